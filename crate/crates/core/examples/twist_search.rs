//! Random search for a diagram `W + full twist` whose invariants match a
//! target Khovanov table.
//!
//! `W` is a Morse tangle from 0 to 12 points with a fixed number of crossings.
//! The diagram is closed by nested caps (point `i` to point `11 - i`) after a
//! positive full twist on points 0..6. The closure without the twist must be
//! an unknot by Jones polynomial, the twisted strands must be split 3 up and
//! 3 down, and the twisted knot must match the determinant, Alexander and
//! Jones polynomials of the target before a full scan is attempted.
//!
//! Other modes:
//! - `bases`: sample reduced 8-crossing unknot diagrams and twist along every
//!   arc crossing 6 distinct edges. Env `TWIST_SEARCH_SIGNS=a,b` restricts the
//!   base crossing signs; `TWIST_SEARCH_HIST` prints rank histograms instead.
//! - `arcs`: the same arc search on hand-written Morse words.
//! - `ranks`: rank/determinant histogram over all twists of one Morse word.
//! - `anneal`: simulated annealing of `W` against the table.
//!
//! usage: twist_search <table.json> <alexander terms e:c,...> [crossings] [seed] [out.pd] [same-sign]
//!        twist_search bases <table.json> <alexander> [seed]
//!        twist_search arcs <table.json> <alexander> <word>...
//!        twist_search ranks <word>
//!        twist_search anneal <table.json> <alexander> [seed] [out.pd]

use std::collections::HashMap;
use std::time::Instant;

use khknot::audit::{alexander_polynomial, determinant};
use khknot::grading::graded_euler;
use khknot::knotio::{Diagram, Sign};
use khknot::scan::{reduced_kh, scan_with, ScanBudget, ScanOptions};
use khknot::{DimTable, Laurent1, ModField};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const WIDTH: usize = 12;
const TWIST: usize = 6;

#[derive(Clone, Copy, Debug)]
enum Op {
    Cup(usize),
    Cap(usize),
    /// Crossing at positions `(p, p + 1)`; `true` when the `BL-TR` strand is over.
    X(usize, bool),
}

fn twist_ops() -> Vec<Op> {
    let mut v = Vec::new();
    for _ in 0..TWIST {
        for p in 0..TWIST - 1 {
            v.push(Op::X(p, true));
        }
    }
    v
}

fn closure_ops() -> Vec<Op> {
    (0..WIDTH / 2).map(|k| Op::Cap(WIDTH / 2 - 1 - k)).collect()
}

fn random_tangle(rng: &mut StdRng, crossings: usize) -> Option<Vec<Op>> {
    let extra = rng.gen_range(0..=2usize);
    random_word(rng, crossings, WIDTH, extra)
}

/// Random Morse word from 0 to `width` points with `extra` cap/cup pairs.
fn random_word(rng: &mut StdRng, crossings: usize, width: usize, extra: usize) -> Option<Vec<Op>> {
    let mut kinds: Vec<u8> = vec![0; width / 2 + extra];
    kinds.extend(std::iter::repeat(1).take(extra));
    kinds.extend(std::iter::repeat(2).take(crossings));
    // random order subject to width constraints
    let mut ops = Vec::new();
    let mut w = 0usize;
    let mut last: Option<Op> = None;
    while !kinds.is_empty() {
        let k = rng.gen_range(0..kinds.len());
        let kind = kinds[k];
        let op = match kind {
            0 => Op::Cup(rng.gen_range(0..=w)),
            1 if w >= 2 => Op::Cap(rng.gen_range(0..w - 1)),
            2 if w >= 2 => Op::X(rng.gen_range(0..w - 1), rng.gen_bool(0.5)),
            _ => {
                if kinds.iter().all(|&x| x != 0) {
                    return None;
                }
                continue;
            }
        };
        // skip moves undone by an obvious Reidemeister or Morse cancellation
        match (last, op) {
            (Some(Op::Cup(a)), Op::Cap(b)) if a == b || a + 1 == b || b + 1 == a => return None,
            (Some(Op::Cup(a)), Op::X(b, _)) if a == b => return None,
            (Some(Op::X(a, _)), Op::Cap(b)) if a == b => return None,
            (Some(Op::X(a, s)), Op::X(b, t)) if a == b && s != t => return None,
            _ => {}
        }
        match op {
            Op::Cup(_) => w += 2,
            Op::Cap(_) => w -= 2,
            Op::X(..) => {}
        }
        if w > WIDTH + 2 {
            return None;
        }
        ops.push(op);
        last = Some(op);
        kinds.swap_remove(k);
    }
    (w == width).then_some(ops)
}

/// Oriented PD of a closed Morse word; crossings keep the order of the word.
fn to_pd(ops: &[Op]) -> Option<Vec<[u32; 4]>> {
    // segment ids joined by union-find; crossing slots in CCW order BR, TR, TL, BL
    let mut parent: Vec<usize> = Vec::new();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let fresh = |p: &mut Vec<usize>| {
        p.push(p.len());
        p.len() - 1
    };
    let mut level: Vec<usize> = Vec::new();
    let mut xs: Vec<([usize; 4], bool)> = Vec::new();
    for op in ops {
        match *op {
            Op::Cup(p) => {
                let s = fresh(&mut parent);
                level.splice(p..p, [s, s]);
            }
            Op::Cap(p) => {
                let (a, b) = (find(&mut parent, level[p]), find(&mut parent, level[p + 1]));
                parent[a] = b;
                level.drain(p..p + 2);
            }
            Op::X(p, blt_over) => {
                let (tl, tr) = (fresh(&mut parent), fresh(&mut parent));
                xs.push(([level[p + 1], tr, tl, level[p]], blt_over));
                level[p] = tl;
                level[p + 1] = tr;
            }
        }
    }
    if !level.is_empty() {
        return None;
    }
    // segment root -> the two crossing slots it joins
    let mut ends: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (c, (sl, _)) in xs.iter().enumerate() {
        for (s, &seg) in sl.iter().enumerate() {
            ends.entry(find(&mut parent, seg)).or_default().push((c, s));
        }
    }
    let roots: std::collections::HashSet<usize> = (0..parent.len()).map(|k| find(&mut parent, k)).collect();
    if ends.values().any(|v| v.len() != 2) || roots.len() != ends.len() {
        return None;
    }
    // traverse, entering crossing c at slot s and leaving at s + 2
    let n = xs.len();
    let mut edge_of: HashMap<usize, u32> = HashMap::new();
    let mut incoming: Vec<[Option<u32>; 4]> = vec![[None; 4]; n];
    let mut outgoing: Vec<[Option<u32>; 4]> = vec![[None; 4]; n];
    let (mut c, mut s) = (0usize, 0usize);
    for k in 0..2 * n {
        let out = (s + 2) % 4;
        let seg = find(&mut parent, xs[c].0[out]);
        let label = k as u32 + 1;
        if edge_of.insert(seg, label).is_some() {
            return None;
        }
        outgoing[c][out] = Some(label);
        let v = &ends[&seg];
        let next = if v[0] == (c, out) { v[1] } else { v[0] };
        incoming[next.0][next.1] = Some(label);
        (c, s) = next;
    }
    if (c, s) != (0, 0) || edge_of.len() != n * 2 {
        return None;
    }
    let mut pd = Vec::new();
    for (k, (_, blt_over)) in xs.iter().enumerate() {
        let lab = |sl: usize| incoming[k][sl].or(outgoing[k][sl]).unwrap();
        // under strand: BR-TL (slots 0, 2) if BL-TR is over, else BL-TR (slots 3, 1)
        let (u0, u1) = if *blt_over { (0, 2) } else { (3, 1) };
        let start = if incoming[k][u0].is_some() { u0 } else { u1 };
        pd.push([lab(start), lab((start + 1) % 4), lab((start + 2) % 4), lab((start + 3) % 4)]);
    }
    Some(pd)
}

type Poly = HashMap<i64, i64>;

/// Unnormalized Jones polynomial via a Temperley-Lieb sweep of the Morse word.
fn jones(ops: &[Op], n_plus: i64, n_minus: i64) -> Laurent1 {
    // state: partner array of current points
    let mut states: HashMap<Vec<u8>, Poly> = HashMap::from([(vec![], HashMap::from([(0, 1)]))]);
    let add = |m: &mut HashMap<Vec<u8>, Poly>, k: Vec<u8>, p: &Poly, shift: i64, mul: i64| {
        let e = m.entry(k).or_default();
        for (x, c) in p {
            *e.entry(x + shift).or_default() += c * mul;
        }
    };
    fn cup(st: &[u8], p: usize) -> Vec<u8> {
        let mut v: Vec<u8> = st.iter().map(|&x| if x as usize >= p { x + 2 } else { x }).collect();
        v.splice(p..p, [p as u8 + 1, p as u8]);
        v
    }
    // returns new state and whether a closed loop formed
    fn cap(st: &[u8], p: usize) -> (Vec<u8>, bool) {
        let (a, b) = (st[p] as usize, st[p + 1] as usize);
        let mut v = st.to_vec();
        let closed = a == p + 1;
        if !closed {
            v[a] = b as u8;
            v[b] = a as u8;
        }
        v.drain(p..p + 2);
        for x in v.iter_mut() {
            if *x as usize > p + 1 {
                *x -= 2;
            }
        }
        (v, closed)
    }
    for op in ops {
        let mut next: HashMap<Vec<u8>, Poly> = HashMap::new();
        for (st, poly) in &states {
            match *op {
                Op::Cup(p) => add(&mut next, cup(st, p), poly, 0, 1),
                Op::Cap(p) => {
                    let (v, closed) = cap(st, p);
                    if closed {
                        add(&mut next, v.clone(), poly, 1, 1);
                        add(&mut next, v, poly, -1, 1);
                    } else {
                        add(&mut next, v, poly, 0, 1);
                    }
                }
                Op::X(p, blt_over) => {
                    // 0-smoothing is vertical when BL-TR is over
                    let (v, closed) = cap(st, p);
                    let e = cup(&v, p);
                    let (zero_vertical, sign) = (blt_over, -1);
                    let (zero, one): (Vec<(Vec<u8>, bool)>, Vec<(Vec<u8>, bool)>) = if zero_vertical {
                        (vec![(st.clone(), false)], vec![(e, closed)])
                    } else {
                        (vec![(e, closed)], vec![(st.clone(), false)])
                    };
                    for (k, cl) in zero {
                        if cl {
                            add(&mut next, k.clone(), poly, 1, 1);
                            add(&mut next, k, poly, -1, 1);
                        } else {
                            add(&mut next, k, poly, 0, 1);
                        }
                    }
                    for (k, cl) in one {
                        if cl {
                            add(&mut next, k.clone(), poly, 2, sign);
                            add(&mut next, k, poly, 0, sign);
                        } else {
                            add(&mut next, k, poly, 1, sign);
                        }
                    }
                }
            }
        }
        next.retain(|_, p| {
            p.retain(|_, c| *c != 0);
            !p.is_empty()
        });
        states = next;
    }
    let total = states.remove(&vec![]).unwrap_or_default();
    let sgn = if n_minus % 2 == 0 { 1 } else { -1 };
    // closed components are never left without a cap, so the empty state holds
    // everything except the final loop factor already applied by caps
    Laurent1::from_terms(total.into_iter().map(|(e, c)| (e + n_plus - 2 * n_minus, sgn * c)))
}

/// Compare the sweep Jones polynomial with the bracket and scan oracles.
fn selftest() {
    let mut rng = StdRng::seed_from_u64(7);
    let (mut plain_ok, mut twisted_ok) = (0, 0);
    while plain_ok < 200 || twisted_ok < 3 {
        let Some(w) = random_tangle(&mut rng, 6) else { continue };
        let mut plain = w.clone();
        plain.extend(closure_ops());
        if plain_ok < 200 {
            if let Some(pd) = to_pd(&plain) {
                let d = Diagram::from_pd(&pd, 0).expect("valid pd");
                let want = khknot::grading::kauffman_jones(&d).expect("bracket");
                assert_eq!(jones(&plain, d.n_plus() as i64, d.n_minus() as i64), want, "{w:?}");
                plain_ok += 1;
            }
            continue;
        }
        let mut full = w.clone();
        full.extend(twist_ops());
        full.extend(closure_ops());
        if let Some(pd) = to_pd(&full) {
            let d = Diagram::from_pd(&pd, 0).expect("valid pd");
            let kh = reduced_kh(&d, &ScanBudget::default()).expect("scan");
            assert_eq!(jones(&full, d.n_plus() as i64, d.n_minus() as i64), graded_euler(&kh), "{w:?}");
            twisted_ok += 1;
            eprintln!("twisted check {twisted_ok} ok");
        }
    }
    eprintln!("selftest ok");
}

/// Widths stay in `[0, WIDTH + 2]`, positions are in range, ends at `WIDTH`.
fn valid(ops: &[Op]) -> bool {
    let mut w = 0usize;
    for op in ops {
        match *op {
            Op::Cup(p) if p <= w => w += 2,
            Op::Cap(p) | Op::X(p, _) if w >= 2 && p < w - 1 => {
                if let Op::Cap(_) = op {
                    w -= 2;
                }
            }
            _ => return false,
        }
        if w > WIDTH + 2 {
            return false;
        }
    }
    w == WIDTH
}

fn l1(a: &Laurent1, b: &Laurent1) -> i64 {
    a.sub(b).terms().map(|(_, c)| c.abs()).sum()
}

fn mutate(rng: &mut StdRng, w: &[Op]) -> Vec<Op> {
    let mut v = w.to_vec();
    let n = v.len();
    let xs: Vec<usize> = (0..n).filter(|&k| matches!(v[k], Op::X(..))).collect();
    match rng.gen_range(0..6) {
        0 => {
            let k = xs[rng.gen_range(0..xs.len())];
            if let Op::X(p, o) = v[k] {
                v[k] = Op::X(if rng.gen_bool(0.5) { p + 1 } else { p.saturating_sub(1) }, o);
            }
        }
        1 => {
            let k = xs[rng.gen_range(0..xs.len())];
            if let Op::X(p, o) = v[k] {
                v[k] = Op::X(p, !o);
            }
        }
        2 => {
            let k = rng.gen_range(0..n - 1);
            v.swap(k, k + 1);
        }
        3 => {
            let k = xs[rng.gen_range(0..xs.len())];
            let op = v.remove(k);
            let at = rng.gen_range(0..=v.len());
            if let Op::X(_, o) = op {
                v.insert(at, Op::X(rng.gen_range(0..WIDTH + 1), o));
            }
        }
        4 => {
            let k = rng.gen_range(0..n);
            let d = if rng.gen_bool(0.5) { 1 } else { usize::MAX };
            v[k] = match v[k] {
                Op::Cup(p) => Op::Cup(p.wrapping_add(d)),
                Op::Cap(p) => Op::Cap(p.wrapping_add(d)),
                x => x,
            };
        }
        _ => {
            let caps: Vec<usize> = (0..n).filter(|&k| matches!(v[k], Op::Cap(_))).collect();
            if !caps.is_empty() && rng.gen_bool(0.5) {
                v.remove(caps[rng.gen_range(0..caps.len())]);
                let cups: Vec<usize> = (0..v.len()).filter(|&k| matches!(v[k], Op::Cup(_))).collect();
                v.remove(cups[rng.gen_range(0..cups.len())]);
            } else if caps.len() < 3 {
                let a = rng.gen_range(0..=v.len());
                v.insert(a, Op::Cup(rng.gen_range(0..WIDTH)));
                let b = rng.gen_range(a + 1..=v.len());
                v.insert(b, Op::Cap(rng.gen_range(0..WIDTH)));
            }
        }
    }
    v
}

struct Target {
    table: DimTable,
    mirror: DimTable,
}

fn table_l1(a: &DimTable, b: &DimTable) -> i64 {
    let mut d: i64 = 0;
    for (g, k) in a.iter() {
        d += (k as i64 - b.get(g.i, g.j) as i64).abs();
    }
    for (g, k) in b.iter() {
        if a.get(g.i, g.j) == 0 {
            d += k as i64;
        }
    }
    d
}

/// `(energy, knot)`: distance of the twisted knot's Khovanov table (mod p) to
/// the target plus a penalty for a nontrivial untwisted closure.
fn energy(w: &[Op], t: &Target) -> Option<(i64, Diagram)> {
    if !valid(w) {
        return None;
    }
    let mut plain = w.to_vec();
    plain.extend(closure_ops());
    let u = Diagram::from_pd(&to_pd(&plain)?, 0).ok()?;
    let ju = jones(&plain, u.n_plus() as i64, u.n_minus() as i64);
    let eu = l1(&ju, &Laurent1::from_terms([(-1, 1), (1, 1)]));
    let mut full = w.to_vec();
    full.extend(twist_ops());
    full.extend(closure_ops());
    let k = Diagram::from_pd(&to_pd(&full)?, 0).ok()?;
    let kh = scan_with::<ModField>(&k, &ScanOptions::default()).ok()?.0;
    let ek = table_l1(&kh, &t.table).min(table_l1(&kh, &t.mirror));
    Some((ek + 4 * eu, k))
}

fn anneal(table: &DimTable, alex: &Laurent1, crossings: usize, seed: u64, out: &str) {
    let t = Target { table: table.clone(), mirror: table.mirrored() };
    let mut rng = StdRng::seed_from_u64(seed);
    let t0 = Instant::now();
    let steps: u64 = std::env::var("TWIST_SEARCH_STEPS").ok().and_then(|s| s.parse().ok()).unwrap_or(20_000);
    for restart in 0.. {
        let (mut w, mut e) = loop {
            let Some(w) = random_tangle(&mut rng, crossings) else { continue };
            if let Some((e, _)) = energy(&w, &t) {
                break (w, e);
            }
        };
        let mut best = e;
        for step in 0..steps {
            let temp = 20.0 * (0.02f64).powf(step as f64 / steps as f64);
            let cand = mutate(&mut rng, &w);
            let Some((ec, k)) = energy(&cand, &t) else { continue };
            if ec <= e || rng.gen::<f64>() < (-((ec - e) as f64) / temp).exp() {
                w = cand;
                e = ec;
            }
            if e < best {
                best = e;
            }
            if step % 1000 == 0 {
                eprintln!("  step {step}: e {e}, best {best}, temp {temp:.2}, {:.0}s", t0.elapsed().as_secs_f64());
            }
            if ec == 0 {
                eprintln!("zero energy at restart {restart} step {step}: {:?}\n{}", w, k.to_pd_string());
                if alexander_polynomial(&k).ok().as_ref() != Some(alex) {
                    eprintln!("alexander differs");
                    continue;
                }
                let kh = reduced_kh(&k, &ScanBudget::default()).expect("scan");
                let found = if kh == *table {
                    Some(k)
                } else if kh == table.mirrored() {
                    Some(k.mirror())
                } else {
                    None
                };
                match found {
                    Some(d) => {
                        std::fs::write(out, format!("{}\n", d.to_pd_string())).expect("write");
                        println!("{}", d.to_pd_string());
                        return;
                    }
                    None => eprintln!("scan differs"),
                }
            }
        }
        eprintln!("restart {restart}: best {best}, final {e}, {:.0}s", t0.elapsed().as_secs_f64());
    }
}

/// Ordered edge lists met by arcs in the plane crossing `len` distinct edges,
/// one per dual walk up to reversal.
fn arcs(u: &Diagram, len: usize) -> Vec<Vec<u32>> {
    let faces = u.faces();
    let mut face_of: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, f) in faces.iter().enumerate() {
        for &dart in f {
            face_of.insert(dart, i);
        }
    }
    let sides: HashMap<u32, (usize, usize)> = u
        .edges()
        .into_iter()
        .map(|e| {
            let (t, h) = u.edge_ends(e).unwrap();
            (e, (face_of[&t], face_of[&h]))
        })
        .collect();
    let mut around: Vec<Vec<u32>> = vec![vec![]; faces.len()];
    for (&e, &(a, b)) in &sides {
        around[a].push(e);
        if b != a {
            around[b].push(e);
        }
    }
    for v in around.iter_mut() {
        v.sort_unstable();
    }
    let mut out = std::collections::BTreeSet::new();
    fn walk(
        f: usize,
        path: &mut Vec<u32>,
        len: usize,
        around: &[Vec<u32>],
        sides: &HashMap<u32, (usize, usize)>,
        out: &mut std::collections::BTreeSet<Vec<u32>>,
    ) {
        if path.len() == len {
            let rev: Vec<u32> = path.iter().rev().copied().collect();
            out.insert(path.clone().min(rev));
            return;
        }
        for &e in &around[f] {
            if path.contains(&e) {
                continue;
            }
            let (a, b) = sides[&e];
            let g = if a == f { b } else { a };
            path.push(e);
            walk(g, path, len, around, sides, out);
            path.pop();
        }
    }
    for f in 0..faces.len() {
        walk(f, &mut Vec::new(), len, &around, &sides, &mut out);
    }
    out.into_iter().collect()
}

/// Try every 6-edge arc of `u` as the twist disk.
fn arc_search(u: &Diagram, table: &DimTable, alex: &Laurent1) -> Option<Diagram> {
    use khknot::knotio::{insert_full_twist, TwistSpec};
    let det_target: i64 = alex.terms().map(|(e, c)| if e % 2 == 0 { c } else { -c }).sum::<i64>().abs();
    let all = arcs(u, TWIST);
    let mut counts = [0usize; 4];
    let mut seen = std::collections::HashSet::new();
    for att in &all {
        for sign in [Sign::Positive, Sign::Negative] {
            let spec = TwistSpec { strands: TWIST, sign, attachment: att.clone() };
            let Ok(k) = insert_full_twist(u, &spec) else { continue };
            counts[0] += 1;
            let n = u.crossing_count();
            let pos = k.crossings().iter().filter(|x| x.sign == Sign::Positive).count() as i64
                - u.crossings().iter().filter(|x| x.sign == Sign::Positive).count() as i64;
            let _ = n;
            if pos != 12 && pos != 18 {
                continue;
            }
            counts[1] += 1;
            if determinant(&k) as i64 != det_target || alexander_polynomial(&k).ok().as_ref() != Some(alex) {
                continue;
            }
            counts[2] += 1;
            let Ok((kh, _)) = scan_with::<ModField>(&k, &ScanOptions::default()) else { continue };
            if !seen.insert(kh.to_json()) {
                continue;
            }
            counts[3] += 1;
            eprintln!("  {att:?} {sign:?}: total rank {}", kh.total());
            if kh == *table || kh == table.mirrored() {
                let kh = reduced_kh(&k, &ScanBudget::default()).expect("scan");
                if kh == *table {
                    return Some(k);
                }
                if kh == table.mirrored() {
                    return Some(k.mirror());
                }
            }
        }
    }
    eprintln!("{} arcs; twisted/split/alexander/distinct = {counts:?}", all.len());
    None
}

/// Khovanov rank and determinant of every 3/3 twist on one base.
fn rank_histogram(u: &Diagram) -> u64 {
    use khknot::knotio::{insert_full_twist, TwistSpec};
    let mut hist: std::collections::BTreeMap<(u64, u64), usize> = Default::default();
    for att in arcs(u, TWIST) {
        for sign in [Sign::Positive, Sign::Negative] {
            let spec = TwistSpec { strands: TWIST, sign, attachment: att.clone() };
            let Ok(k) = insert_full_twist(u, &spec) else { continue };
            let pos = k.crossings().iter().filter(|x| x.sign == Sign::Positive).count()
                - u.crossings().iter().filter(|x| x.sign == Sign::Positive).count();
            if pos != 12 && pos != 18 {
                continue;
            }
            let Ok((kh, _)) = scan_with::<ModField>(&k, &ScanOptions::default()) else { continue };
            *hist.entry((kh.total(), determinant(&k))).or_default() += 1;
        }
    }
    for ((r, d), c) in &hist {
        println!("rank {r} det {d}: {c}");
    }
    hist.keys().map(|k| k.0).max().unwrap_or(0)
}

/// Diagram of a closed Morse word (for building base diagrams by hand).
fn morse_diagram(text: &str) -> Diagram {
    let ops: Vec<Op> = text
        .split_whitespace()
        .map(|t| {
            let (k, v) = t.split_at(1);
            let p: usize = v.trim_start_matches(['+', '-']).parse().expect("position");
            match k {
                "u" => Op::Cup(p),
                "n" => Op::Cap(p),
                "x" => Op::X(p, !v.starts_with('-')),
                _ => panic!("bad op {t}"),
            }
        })
        .collect();
    let Some(pd) = to_pd(&ops) else {
        eprintln!("{text}: not a knot");
        std::process::exit(1)
    };
    Diagram::from_pd(&pd, 0).expect("valid")
}

/// Some crossing has the same face at two opposite corners.
fn has_nugatory(d: &Diagram) -> bool {
    let mut face_of: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, f) in d.faces().iter().enumerate() {
        for &dart in f {
            face_of.insert(dart, i);
        }
    }
    (0..d.crossing_count()).any(|c| face_of[&(c, 0)] == face_of[&(c, 2)] || face_of[&(c, 1)] == face_of[&(c, 3)])
}

/// Relabelling-invariant key: the smallest sorted tuple list over all
/// starting edges of the traversal.
fn canonical(d: &Diagram) -> Vec<[u32; 4]> {
    let order = d.traversal();
    let n = order.len();
    let mut best: Option<Vec<[u32; 4]>> = None;
    for start in 0..n {
        let label: HashMap<u32, u32> = (0..n).map(|k| (order[(start + k) % n], k as u32 + 1)).collect();
        let mut t: Vec<[u32; 4]> = d.pd_tuples().iter().map(|x| x.map(|e| label[&e])).collect();
        t.sort_unstable();
        if best.as_ref().map_or(true, |b| t < *b) {
            best = Some(t);
        }
    }
    best.unwrap_or_default()
}

/// Sample reduced 8-crossing unknot diagrams and try every arc on each.
fn base_search(table: &DimTable, alex: &Laurent1, seed: u64) -> Option<Diagram> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::new();
    let unknot = Laurent1::from_terms([(-1, 1), (1, 1)]);
    let t0 = Instant::now();
    // optional "a,b": base crossing signs must split as a and b
    let split: Option<(usize, usize)> = std::env::var("TWIST_SEARCH_SIGNS").ok().map(|v| {
        let (a, b) = v.split_once(',').expect("a,b");
        (a.parse().unwrap(), b.parse().unwrap())
    });
    loop {
        let extra = rng.gen_range(2..=5usize);
        let Some(w) = random_word(&mut rng, 8, 0, extra) else { continue };
        let Some(pd) = to_pd(&w) else { continue };
        let Ok(u) = Diagram::from_pd(&pd, 0) else { continue };
        if let Some((a, b)) = split {
            let (p, m) = (u.n_plus(), u.n_minus());
            if (p, m) != (a, b) && (p, m) != (b, a) {
                continue;
            }
        }
        if has_nugatory(&u) || jones(&w, u.n_plus() as i64, u.n_minus() as i64) != unknot {
            continue;
        }
        if !seen.insert(canonical(&u)) {
            continue;
        }
        eprintln!("base #{} after {:.0}s: {}", seen.len(), t0.elapsed().as_secs_f64(), u.to_pd_string());
        if std::env::var("TWIST_SEARCH_HIST").is_ok() {
            eprintln!("  max rank {}", rank_histogram(&u));
            continue;
        }
        if let Some(k) = arc_search(&u, table, alex) {
            return Some(k);
        }
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.get(1).map(String::as_str) == Some("ranks") {
        rank_histogram(&morse_diagram(&args[2]));
        return;
    }
    if args.get(1).map(String::as_str) == Some("bases") {
        let table = DimTable::from_json(&std::fs::read_to_string(&args[2]).expect("table")).expect("table json");
        let alex = Laurent1::from_terms(args[3].split(',').map(|t| {
            let (e, c) = t.split_once(':').expect("e:c");
            (e.parse().unwrap(), c.parse().unwrap())
        }));
        let seed = args.get(4).map_or(1, |s| s.parse().unwrap());
        if let Some(k) = base_search(&table, &alex, seed) {
            println!("{}", k.to_pd_string());
        }
        return;
    }
    if args.get(1).map(String::as_str) == Some("arcs") {
        let table = DimTable::from_json(&std::fs::read_to_string(&args[2]).expect("table")).expect("table json");
        let alex = Laurent1::from_terms(args[3].split(',').map(|t| {
            let (e, c) = t.split_once(':').expect("e:c");
            (e.parse().unwrap(), c.parse().unwrap())
        }));
        for word in &args[4..] {
            let u = morse_diagram(word);
            if std::env::var_os("TWIST_SEARCH_PROBE").is_some() {
                eprintln!("{word}: det {} alexander {}", determinant(&u), alexander_polynomial(&u).unwrap());
                continue;
            }
            eprintln!("base {word}: {} crossings, jones {}", u.crossing_count(), khknot::grading::kauffman_jones(&u).unwrap());
            if let Some(k) = arc_search(&u, &table, &alex) {
                println!("{}", k.to_pd_string());
                return;
            }
        }
        return;
    }
    if args.get(1).map(String::as_str) == Some("selftest") {
        return selftest();
    }
    if args.get(1).map(String::as_str) == Some("anneal") {
        let table = DimTable::from_json(&std::fs::read_to_string(&args[2]).expect("table")).expect("table json");
        let alex = Laurent1::from_terms(args[3].split(',').map(|t| {
            let (e, c) = t.split_once(':').expect("e:c");
            (e.parse().unwrap(), c.parse().unwrap())
        }));
        let seed = args.get(4).map_or(1, |s| s.parse().unwrap());
        let out = args.get(5).cloned().unwrap_or_else(|| "found.pd".into());
        return anneal(&table, &alex, 8, seed, &out);
    }
    let table = DimTable::from_json(&std::fs::read_to_string(&args[1]).expect("table")).expect("table json");
    let alex = Laurent1::from_terms(args[2].split(',').map(|t| {
        let (e, c) = t.split_once(':').expect("e:c");
        (e.parse().unwrap(), c.parse().unwrap())
    }));
    let crossings: usize = args.get(3).map_or(8, |s| s.parse().unwrap());
    let seed: u64 = args.get(4).map_or(1, |s| s.parse().unwrap());
    let out = args.get(5).cloned().unwrap_or_else(|| "found.pd".into());
    let same_sign = args.get(6).is_some_and(|s| s == "same-sign");
    let det_target: i64 = alex.terms().map(|(e, c)| if e % 2 == 0 { c } else { -c }).sum::<i64>().abs();
    let jones_target = graded_euler(&table);
    let jones_mirror = Laurent1::from_terms(jones_target.terms().map(|(e, c)| (-e, c)));
    let unknot_jones = Laurent1::from_terms([(-1, 1), (1, 1)]);
    let mut rng = StdRng::seed_from_u64(seed);
    let t0 = Instant::now();
    let mut counts = [0u64; 6];
    let mut seen = std::collections::HashSet::new();
    loop {
        counts[0] += 1;
        if counts[0] % 200_000 == 0 {
            eprintln!("{:?} tries/closed/unknot/det/alex/jones after {:.0}s", counts, t0.elapsed().as_secs_f64());
        }
        let Some(mut w) = random_tangle(&mut rng, crossings) else { continue };
        let mut plain = w.clone();
        plain.extend(closure_ops());
        let Some(pd_u) = to_pd(&plain) else { continue };
        counts[1] += 1;
        let Ok(u) = Diagram::from_pd(&pd_u, 0) else { continue };
        if same_sign {
            // over/under chosen so every crossing of W has the sign `want`
            let want = if rng.gen_bool(0.5) { Sign::Positive } else { Sign::Negative };
            let mut k = 0;
            for op in w.iter_mut() {
                if let Op::X(_, over) = op {
                    if u.crossings()[k].sign != want {
                        *over = !*over;
                    }
                    k += 1;
                }
            }
            plain = w.clone();
            plain.extend(closure_ops());
        }
        let Ok(u) = Diagram::from_pd(&to_pd(&plain).unwrap(), 0) else { continue };
        if jones(&plain, u.n_plus() as i64, u.n_minus() as i64) != unknot_jones {
            continue;
        }
        counts[2] += 1;
        let mut full = w.clone();
        full.extend(twist_ops());
        full.extend(closure_ops());
        let Some(pd_k) = to_pd(&full) else { continue };
        let Ok(k) = Diagram::from_pd(&pd_k, 0) else { continue };
        // a 3 up / 3 down split has 12 crossings of one sign in the twist
        let pos = k.crossings()[crossings..].iter().filter(|x| x.sign == Sign::Positive).count();
        if pos != 12 && pos != 18 {
            continue;
        }
        if determinant(&k) as i64 != det_target {
            continue;
        }
        counts[3] += 1;
        if alexander_polynomial(&k).ok() != Some(alex.clone()) {
            continue;
        }
        counts[4] += 1;
        let jk = jones(&full, k.n_plus() as i64, k.n_minus() as i64);
        if jk != jones_target && jk != jones_mirror {
            if std::env::var_os("TWIST_SEARCH_DEBUG").is_some() {
                eprintln!("jones miss: {jk}  n+={} n-={}", k.n_plus(), k.n_minus());
            }
            continue;
        }
        counts[5] += 1;
        let pd = k.to_pd_string();
        if !seen.insert(pd.clone()) {
            continue;
        }
        eprintln!("candidate after {:.0}s: {:?}\n{pd}", t0.elapsed().as_secs_f64(), w);
        let kh = reduced_kh(&k, &ScanBudget::default()).expect("scan");
        let verdict = if kh == table {
            "table"
        } else if kh == table.mirrored() {
            "mirror"
        } else {
            "different"
        };
        eprintln!("scan verdict: {verdict}");
        if verdict != "different" {
            let d = if verdict == "mirror" { k.mirror() } else { k };
            std::fs::write(&out, format!("{}\n", d.to_pd_string())).expect("write");
            println!("{}", d.to_pd_string());
            return;
        }
    }
}
