//! Cube of resolutions and the Khovanov / Lee cochain complex of a diagram.
//!
//! The Frobenius algebra is `Q[X]/(X^2 - t)` with basis `{1, X}` in quantum
//! degrees `+1` and `-1`. The plain theory has `t = 0`; the Lee theory has
//! `t = 1`, and the `t`-terms of multiplication and comultiplication are
//! exactly the parts of the differential that raise `j` by 4 (`phi`).
//!
//! Generator gradings: `i = r - n_-`, `j = (#1 - #X) + r + n_+ - 2 n_-`,
//! where `r` is the number of 1-smoothings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{homology_dims, HomologyError, SparseMat};
use crate::grading::DimTable;
use crate::knotio::{Diagram, EdgeId};
use crate::scalar::Field;

pub const DEFAULT_MAX_DIRECT: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theory {
    Plain,
    Lee,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("{crossings} crossings exceed the direct-cube budget of {max}; use the scan route")]
    Budget { crossings: usize, max: usize },
    #[error("diagram has {0} components, a knot is required")]
    NotAKnot(usize),
    #[error("resolution has {got} bits for {expected} crossings")]
    Length { got: usize, expected: usize },
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

/// A vertex of the cube with its circles. Circles are sets of edge labels,
/// ordered by their smallest label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub vertex: u64,
    pub circles: Vec<Vec<EdgeId>>,
    circle_of_edge: FxHashMap<EdgeId, usize>,
}

impl Resolution {
    pub fn circle_count(&self) -> usize {
        self.circles.len()
    }

    pub fn circle_of(&self, e: EdgeId) -> usize {
        self.circle_of_edge[&e]
    }
}

/// Resolve every crossing according to `bits` (`bits[k]` for crossing `k`).
pub fn resolve(d: &Diagram, bits: &[u8]) -> Result<Resolution, ComplexError> {
    if bits.len() != d.crossing_count() {
        return Err(ComplexError::Length { got: bits.len(), expected: d.crossing_count() });
    }
    let vertex = bits.iter().enumerate().fold(0u64, |v, (k, b)| if *b != 0 { v | 1 << k } else { v });
    Ok(resolve_vertex(d, vertex))
}

pub(crate) fn resolve_vertex(d: &Diagram, vertex: u64) -> Resolution {
    let edges = d.edges();
    let index: FxHashMap<EdgeId, usize> = edges.iter().enumerate().map(|(k, e)| (*e, k)).collect();
    let mut parent: Vec<usize> = (0..edges.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (k, x) in d.crossings().iter().enumerate() {
        let bit = ((vertex >> k) & 1) as u8;
        for (a, b) in x.smoothing(bit) {
            let (ra, rb) = (find(&mut parent, index[&x.edges[a]]), find(&mut parent, index[&x.edges[b]]));
            parent[ra] = rb;
        }
    }
    let mut groups: BTreeMap<usize, Vec<EdgeId>> = BTreeMap::new();
    for (k, e) in edges.iter().enumerate() {
        let r = find(&mut parent, k);
        groups.entry(r).or_default().push(*e);
    }
    let mut circles: Vec<Vec<EdgeId>> = groups.into_values().collect();
    circles.sort_by_key(|c| c[0]);
    // crossingless components are circles without edges
    for _ in 0..d.free_loops() {
        circles.push(vec![]);
    }
    let mut circle_of_edge = FxHashMap::default();
    for (k, c) in circles.iter().enumerate() {
        for e in c {
            circle_of_edge.insert(*e, k);
        }
    }
    Resolution { vertex, circles, circle_of_edge }
}

/// Enhanced state: a vertex plus a label per circle (bit set = X).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Generator {
    pub vertex: u64,
    pub labels: u32,
    pub i: i64,
    pub j: i64,
}

/// Cochain complex with the differential split as `d0 + phi`; `d0` preserves
/// `j`, `phi` raises it by exactly 4. Matrices map degree `i` to `i + 1`
/// (rows index targets).
#[derive(Clone, Debug)]
pub struct FilteredComplex<F> {
    pub theory: Theory,
    gens: BTreeMap<i64, Vec<Generator>>,
    d0: BTreeMap<i64, SparseMat<F>>,
    phi: BTreeMap<i64, SparseMat<F>>,
}

impl<F: Field> FilteredComplex<F> {
    /// Assemble from parts; used by tests and by reductions.
    pub fn from_parts(
        theory: Theory,
        gens: BTreeMap<i64, Vec<Generator>>,
        d0: BTreeMap<i64, SparseMat<F>>,
        phi: BTreeMap<i64, SparseMat<F>>,
    ) -> Self {
        FilteredComplex { theory, gens, d0, phi }
    }

    pub fn generators(&self) -> &BTreeMap<i64, Vec<Generator>> {
        &self.gens
    }

    pub fn d0(&self, i: i64) -> Option<&SparseMat<F>> {
        self.d0.get(&i)
    }

    pub fn phi(&self, i: i64) -> Option<&SparseMat<F>> {
        self.phi.get(&i)
    }

    /// Full differential `d0 + phi` out of degree `i`.
    pub fn differential(&self, i: i64) -> Option<SparseMat<F>> {
        match (self.d0.get(&i), self.phi.get(&i)) {
            (Some(a), Some(b)) => Some(a.add(b)),
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (None, None) => None,
        }
    }

    pub fn rank_at(&self, i: i64) -> usize {
        self.gens.get(&i).map_or(0, |g| g.len())
    }

    pub fn total_rank(&self) -> usize {
        self.gens.values().map(|g| g.len()).sum()
    }

    /// Exact check of `D_{i+1} D_i = 0` for every `i`.
    pub fn check_d_squared(&self) -> Result<(), HomologyError> {
        for &i in self.gens.keys() {
            if let (Some(a), Some(b)) = (self.differential(i), self.differential(i + 1)) {
                if !b.mul(&a).is_zero() {
                    return Err(HomologyError::NotAComplex(i));
                }
            }
        }
        Ok(())
    }

    /// Every entry of `d0` keeps `j`, every entry of `phi` raises it by 4.
    pub fn check_grading(&self) -> bool {
        let ok = |mats: &BTreeMap<i64, SparseMat<F>>, shift: i64| {
            mats.iter().all(|(i, m)| {
                let (src, dst) = (&self.gens[i], &self.gens[&(i + 1)]);
                m.entries().iter().all(|(r, c, _)| dst[*r].j == src[*c].j + shift && dst[*r].i == src[*c].i + 1)
            })
        };
        ok(&self.d0, 0) && ok(&self.phi, 4)
    }

    /// Debug dump: generators per degree and the matrix triplets.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (i, gens) in &self.gens {
            let _ = writeln!(s, "degree {i}: {} generators", gens.len());
            for (k, g) in gens.iter().enumerate() {
                let _ = writeln!(s, "  {k}: vertex={:b} labels={:b} j={}", g.vertex, g.labels, g.j);
            }
            if let Some(m) = self.d0.get(i) {
                let _ = write!(s, "d0[{i}] {}", m.dump());
            }
            if let Some(m) = self.phi.get(i) {
                let _ = write!(s, "phi[{i}] {}", m.dump());
            }
        }
        s
    }
}

/// Build the complex by the direct cube construction.
pub fn build_complex<F: Field>(d: &Diagram, theory: Theory) -> Result<FilteredComplex<F>, ComplexError> {
    build_complex_with_budget(d, theory, DEFAULT_MAX_DIRECT)
}

pub fn build_complex_with_budget<F: Field>(
    d: &Diagram,
    theory: Theory,
    max_crossings: usize,
) -> Result<FilteredComplex<F>, ComplexError> {
    let n = d.crossing_count();
    if n > max_crossings || n > 62 {
        return Err(ComplexError::Budget { crossings: n, max: max_crossings });
    }
    if !d.is_knot() {
        return Err(ComplexError::NotAKnot(d.components()));
    }
    let (np, nm) = (d.n_plus() as i64, d.n_minus() as i64);
    let resolutions: Vec<Resolution> = (0..1u64 << n).map(|v| resolve_vertex(d, v)).collect();

    let mut gens: BTreeMap<i64, Vec<Generator>> = BTreeMap::new();
    for res in &resolutions {
        let r = res.vertex.count_ones() as i64;
        let c = res.circle_count();
        for labels in 0..1u32 << c {
            let xs = labels.count_ones() as i64;
            let deg = c as i64 - 2 * xs;
            gens.entry(r - nm).or_default().push(Generator { vertex: res.vertex, labels, i: r - nm, j: deg + r + np - 2 * nm });
        }
    }
    for g in gens.values_mut() {
        g.sort_unstable_by_key(|g| (g.vertex, g.labels));
    }
    let index: FxHashMap<(u64, u32), usize> =
        gens.values().flat_map(|v| v.iter().enumerate().map(|(k, g)| ((g.vertex, g.labels), k))).collect();

    let t_coeff = match theory {
        Theory::Plain => None,
        Theory::Lee => Some(F::one()),
    };
    let mut d0_trip: BTreeMap<i64, Vec<(usize, usize, F)>> = BTreeMap::new();
    let mut phi_trip: BTreeMap<i64, Vec<(usize, usize, F)>> = BTreeMap::new();
    for res in &resolutions {
        let v = res.vertex;
        let i = v.count_ones() as i64 - nm;
        for k in 0..n {
            if v >> k & 1 == 1 {
                continue;
            }
            let w = v | 1 << k;
            let target = &resolutions[w as usize];
            let sign = if (v & ((1u64 << k) - 1)).count_ones() % 2 == 0 { F::one() } else { -F::one() };
            let x = &d.crossings()[k];
            let (ca, cb) = (res.circle_of(x.edges[0]), res.circle_of(x.edges[2]));
            // circles not touched by the edge map to the target circle through any edge
            let image = |c: usize| -> usize {
                match res.circles[c].first() {
                    Some(e) => target.circle_of(*e),
                    None => target.circle_count() - (res.circle_count() - c),
                }
            };
            let n_src = res.circle_count();
            let rest: Vec<(usize, usize)> =
                (0..n_src).filter(|&c| c != ca && c != cb).map(|c| (c, image(c))).collect();
            let carry = |labels: u32| -> u32 {
                rest.iter().fold(0u32, |acc, &(s, t)| if labels >> s & 1 == 1 { acc | 1 << t } else { acc })
            };
            for labels in 0..1u32 << n_src {
                let src = index[&(v, labels)];
                let base = carry(labels);
                let mut emit = |tl: u32, coeff: F, raises: bool| {
                    let dst = index[&(w, tl)];
                    let e = (dst, src, coeff * sign.clone());
                    if raises {
                        phi_trip.entry(i).or_default().push(e);
                    } else {
                        d0_trip.entry(i).or_default().push(e);
                    }
                };
                if ca != cb {
                    // merge
                    let m = target.circle_of(x.edges[0]);
                    let (xa, xb) = (labels >> ca & 1, labels >> cb & 1);
                    match (xa, xb) {
                        (0, 0) => emit(base, F::one(), false),
                        (1, 0) | (0, 1) => emit(base | 1 << m, F::one(), false),
                        _ => {
                            if let Some(t) = &t_coeff {
                                emit(base, t.clone(), true);
                            }
                        }
                    }
                } else {
                    // split
                    let (m1, m2) = (target.circle_of(x.edges[0]), target.circle_of(x.edges[2]));
                    if labels >> ca & 1 == 0 {
                        emit(base | 1 << m1, F::one(), false);
                        emit(base | 1 << m2, F::one(), false);
                    } else {
                        emit(base | 1 << m1 | 1 << m2, F::one(), false);
                        if let Some(t) = &t_coeff {
                            emit(base, t.clone(), true);
                        }
                    }
                }
            }
        }
    }
    let size = |i: i64| gens.get(&i).map_or(0, |g| g.len());
    let assemble = |trip: BTreeMap<i64, Vec<(usize, usize, F)>>| -> BTreeMap<i64, SparseMat<F>> {
        trip.into_iter().map(|(i, t)| (i, SparseMat::from_triplets(size(i + 1), size(i), t))).collect()
    };
    let mut d0 = assemble(d0_trip);
    let mut phi = assemble(phi_trip);
    for &i in gens.keys() {
        if gens.contains_key(&(i + 1)) {
            d0.entry(i).or_insert_with(|| SparseMat::zeros(size(i + 1), size(i)));
            if theory == Theory::Lee {
                phi.entry(i).or_insert_with(|| SparseMat::zeros(size(i + 1), size(i)));
            }
        }
    }
    Ok(FilteredComplex { theory, gens, d0, phi })
}

/// Rational Khovanov homology by the direct cube.
pub fn khovanov_homology(d: &Diagram) -> Result<DimTable, ComplexError> {
    khovanov_homology_with_budget(d, DEFAULT_MAX_DIRECT)
}

pub fn khovanov_homology_with_budget(d: &Diagram, max_crossings: usize) -> Result<DimTable, ComplexError> {
    let c = build_complex_with_budget::<crate::Rat>(d, Theory::Plain, max_crossings)?;
    Ok(homology_dims(&c)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knotio::{catalog_get, parse_pd};
    use crate::Rat;

    fn table(cells: &[((i64, i64), u64)]) -> DimTable {
        DimTable::from_cells(cells.iter().copied())
    }

    #[test]
    fn resolve_examples() {
        let u = catalog_get("unknot").unwrap();
        assert_eq!(resolve(&u, &[]).unwrap().circle_count(), 1);
        let t = catalog_get("trefoil_r").unwrap();
        assert_eq!(resolve(&t, &[0, 0, 0]).unwrap().circle_count(), 2);
        assert_eq!(resolve(&t, &[1, 1, 1]).unwrap().circle_count(), 3);
        assert!(matches!(resolve(&t, &[0, 1]), Err(ComplexError::Length { .. })));
    }

    #[test]
    fn unknot_complex() {
        let c = build_complex::<Rat>(&catalog_get("unknot").unwrap(), Theory::Plain).unwrap();
        assert_eq!(c.generators().len(), 1);
        assert_eq!(c.total_rank(), 2);
        assert_eq!(khovanov_homology(&catalog_get("unknot").unwrap()).unwrap(), table(&[((0, -1), 1), ((0, 1), 1)]));
    }

    #[test]
    fn trefoil_plain_and_lee() {
        let t = catalog_get("trefoil_r").unwrap();
        let expect = table(&[((0, 1), 1), ((0, 3), 1), ((2, 5), 1), ((3, 9), 1)]);
        assert_eq!(khovanov_homology(&t).unwrap(), expect);
        let lee = build_complex::<Rat>(&t, Theory::Lee).unwrap();
        lee.check_d_squared().unwrap();
        assert!(lee.check_grading());
        assert!((0..=3).any(|i| lee.phi(i).is_some_and(|m| !m.is_zero())));
        assert_eq!(homology_dims(&lee).unwrap(), expect);
    }

    #[test]
    fn figure_eight_symmetric() {
        let kh = khovanov_homology(&catalog_get("figure8").unwrap()).unwrap();
        assert_eq!(kh.total(), 6);
        assert_eq!(kh.mirrored(), kh);
    }

    #[test]
    fn budget_and_components() {
        let t = catalog_get("trefoil_r").unwrap();
        assert!(matches!(khovanov_homology_with_budget(&t, 2), Err(ComplexError::Budget { .. })));
        let hopf = parse_pd("X[4,1,3,2] X[2,3,1,4]").unwrap();
        assert!(matches!(build_complex::<Rat>(&hopf, Theory::Plain), Err(ComplexError::NotAKnot(2))));
    }
}
