//! Randomized invariants over closed braids.

use proptest::prelude::*;

use khknot::audit::knight_move_solve;
use khknot::grading::{graded_euler, kauffman_jones, poincare_series};
use khknot::khcomplex::{build_complex, khovanov_homology};
use khknot::knotio::{from_braid, parse_pd};
use khknot::lee::lee_decomposition;
use khknot::scan::{scan_with, ScanOptions};
use khknot::{Diagram, ModField, Rat, Theory};

fn braid() -> impl Strategy<Value = (Vec<i32>, usize)> {
    (2usize..=4).prop_flat_map(|n| {
        let gen = (1..n as i32).prop_flat_map(|g| prop_oneof![Just(g), Just(-g)]);
        (prop::collection::vec(gen, 1..=8), Just(n))
    })
    .prop_filter("closure is a knot", |(w, n)| from_braid(w, *n).unwrap().is_knot())
}

fn knot() -> impl Strategy<Value = Diagram> {
    braid().prop_map(|(w, n)| from_braid(&w, n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_squared_vanishes((w, n) in braid()) {
        let d = from_braid(&w, n).unwrap();
        for theory in [Theory::Plain, Theory::Lee] {
            let c = build_complex::<Rat>(&d, theory).unwrap();
            prop_assert!(c.check_d_squared().is_ok());
            prop_assert!(c.check_grading());
        }
    }

    #[test]
    fn scan_matches_cube_and_jones((w, n) in braid()) {
        let d = from_braid(&w, n).unwrap();
        let kh = khovanov_homology(&d).unwrap();
        let scanned = scan_with::<Rat>(&d, &ScanOptions::default()).unwrap().0;
        prop_assert_eq!(&kh, &scanned);
        let mod_p = scan_with::<ModField>(&d, &ScanOptions::default()).unwrap().0;
        prop_assert_eq!(&kh, &mod_p);
        prop_assert_eq!(graded_euler(&kh), kauffman_jones(&d).unwrap());
    }

    #[test]
    fn mirror_and_parity(d in knot()) {
        let kh = khovanov_homology(&d).unwrap();
        prop_assert!(kh.iter().all(|(g, _)| g.j.rem_euclid(2) == 1));
        prop_assert_eq!(khovanov_homology(&d.mirror()).unwrap(), kh.mirrored());
    }

    #[test]
    fn pages_and_decomposition(d in knot()) {
        let (res, dec) = lee_decomposition(&d).unwrap();
        prop_assert_eq!(res.pages.e_infinity.total(), 2);
        prop_assert!(dec.f.values().all(|f| f.is_nonnegative()));
        for w in res.pages.pages.windows(2) {
            let (p, q) = (&w[0], &w[1]);
            prop_assert_eq!(q.dims.total() + 2 * p.total_rank() as u64, p.dims.total());
            let mut next = p.dims.clone();
            for (&(i, j), &r) in &p.diff_ranks {
                next.sub(i, j, r as u64);
                next.sub(i + 1, j + 4 * p.n as i64, r as u64);
            }
            prop_assert_eq!(&next, &q.dims);
        }
        if dec.is_knight_move() {
            let kh = poincare_series(&res.pages.pages[0].dims);
            prop_assert!(knight_move_solve(&kh, res.s).unwrap().holds());
        }
    }

    #[test]
    fn conjugation_and_stabilization_invariance((w, n) in braid(), k in 0usize..8) {
        let d = from_braid(&w, n).unwrap();
        let kh = khovanov_homology(&d).unwrap();
        let mut conj = w.clone();
        conj.rotate_left(k % w.len());
        prop_assert_eq!(&khovanov_homology(&from_braid(&conj, n).unwrap()).unwrap(), &kh);
        let mut stab = w.clone();
        stab.push(n as i32);
        prop_assert_eq!(&khovanov_homology(&from_braid(&stab, n + 1).unwrap()).unwrap(), &kh);
    }

    #[test]
    fn pd_round_trip(d in knot()) {
        let back = parse_pd(&d.to_pd_string()).unwrap();
        prop_assert_eq!(back.crossing_count(), d.crossing_count());
        prop_assert_eq!(back.writhe(), d.writhe());
        prop_assert_eq!(khovanov_homology(&back).unwrap(), khovanov_homology(&d).unwrap());
    }
}
