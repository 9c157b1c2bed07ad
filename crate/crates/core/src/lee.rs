//! Lee spectral sequence of a filtered complex, the s-invariant and the
//! decomposition `Kh = q^s (q + q^-1) + sum_l f_2l (1 + t q^{4l})`.
//!
//! Pages use the indexing `E_1 = Kh`, `d_n` of bidegree `(1, 4n)`. In the
//! usual filtration-degree indexing this `E_n` is `E_{4n}` and `d_n` is
//! `d_{4n}`; the page formulas below work with that filtration degree `r`.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::exactla::{rank, SparseMat};
use crate::grading::{poincare_series, DimTable, Laurent2};
use crate::khcomplex::{build_complex_with_budget, ComplexError, FilteredComplex, Theory, DEFAULT_MAX_DIRECT};
use crate::knotio::Diagram;
use crate::scalar::Field;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LeeError {
    #[error("E-infinity has total dimension {0}, expected 2")]
    EInfinity(u64),
    #[error("E-infinity is not a pawn pair at i = 0: {0}")]
    Malformed(String),
    #[error("decomposition identity fails: {0}")]
    Identity(String),
    #[error("complex is not in the Lee theory")]
    Theory,
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Page {
    pub n: usize,
    pub dims: DimTable,
    /// Rank of `d_n` out of each source bigrading (nonzero ranks only).
    pub diff_ranks: BTreeMap<(i64, i64), usize>,
}

impl Page {
    pub fn total_rank(&self) -> usize {
        self.diff_ranks.values().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageSet {
    pub pages: Vec<Page>,
    pub e_infinity: DimTable,
}

impl PageSet {
    /// Largest `n` with `d_n != 0`, or 0.
    pub fn last_nonzero(&self) -> usize {
        self.pages.iter().filter(|p| p.total_rank() > 0).map(|p| p.n).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pages: Vec<serde_json::Value> = self
            .pages
            .iter()
            .map(|p| {
                let ranks: Vec<serde_json::Value> = p
                    .diff_ranks
                    .iter()
                    .map(|((i, j), r)| serde_json::json!({"i": i, "j": j, "rank": r, "target": [i + 1, j + 4 * p.n as i64]}))
                    .collect();
                serde_json::json!({"n": p.n, "dims": p.dims.to_json_value(), "diff_ranks": ranks})
            })
            .collect();
        serde_json::json!({"pages": pages, "e_infinity": self.e_infinity.to_json_value()})
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeeResult {
    pub s: i64,
    pub pages: PageSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionFamily {
    pub s: i64,
    pub f: BTreeMap<usize, Laurent2>,
}

impl DecompositionFamily {
    pub fn is_knight_move(&self) -> bool {
        self.f.iter().all(|(l, f)| *l == 1 || f.is_zero())
    }
}

/// Complex with `d0 = 0`, obtained by cancelling every `j`-preserving entry.
struct Reduced<F> {
    /// `(i, j)` of each surviving generator.
    gens: Vec<(i64, i64)>,
    out: Vec<FxHashMap<u32, F>>,
}

fn reduce<F: Field>(c: &FilteredComplex<F>) -> Reduced<F> {
    let mut gens: Vec<(i64, i64)> = Vec::new();
    let mut offset: BTreeMap<i64, usize> = BTreeMap::new();
    for (&i, g) in c.generators() {
        offset.insert(i, gens.len());
        gens.extend(g.iter().map(|g| (i, g.j)));
    }
    let n = gens.len();
    let mut out: Vec<FxHashMap<u32, F>> = vec![FxHashMap::default(); n];
    let mut inc: Vec<FxHashSet<u32>> = vec![FxHashSet::default(); n];
    for &i in c.generators().keys() {
        if let Some(m) = c.differential(i) {
            let (s0, t0) = (offset[&i], offset[&(i + 1)]);
            for (r, col, v) in m.entries() {
                out[s0 + col].insert((t0 + r) as u32, v.clone());
                inc[t0 + r].insert((s0 + col) as u32);
            }
        }
    }
    let mut alive = vec![true; n];
    loop {
        let mut cands: Vec<(usize, u32, u32)> = Vec::new();
        for b in 0..n {
            for &t in out[b].keys() {
                if gens[b].1 == gens[t as usize].1 {
                    cands.push(((inc[t as usize].len() - 1) * (out[b].len() - 1), b as u32, t));
                }
            }
        }
        if cands.is_empty() {
            break;
        }
        cands.sort_unstable();
        for (_, b, t) in cands {
            let (bu, tu) = (b as usize, t as usize);
            if !alive[bu] || !alive[tu] {
                continue;
            }
            let Some(phi) = out[bu].get(&t).cloned() else { continue };
            let scale = -(F::one() / phi);
            let deltas: Vec<(u32, F)> =
                inc[tu].iter().filter(|&&s| s != b).map(|&s| (s, out[s as usize][&t].clone())).collect();
            let gammas: Vec<(u32, F)> = out[bu].iter().filter(|(k, _)| **k != t).map(|(k, v)| (*k, v.clone())).collect();
            for x in [b, t] {
                let xu = x as usize;
                for k in std::mem::take(&mut out[xu]).into_keys() {
                    inc[k as usize].remove(&x);
                }
                for s in std::mem::take(&mut inc[xu]) {
                    out[s as usize].remove(&x);
                }
                alive[xu] = false;
            }
            for (b2, dv) in &deltas {
                for (c2, gv) in &gammas {
                    let add = gv.clone() * dv.clone() * scale.clone();
                    let slot = out[*b2 as usize].entry(*c2).or_insert_with(F::zero);
                    *slot += add;
                    if slot.is_zero() {
                        out[*b2 as usize].remove(c2);
                        inc[*c2 as usize].remove(b2);
                    } else {
                        inc[*c2 as usize].insert(*b2);
                    }
                }
            }
        }
    }
    let map: Vec<Option<u32>> = {
        let mut k = 0u32;
        alive
            .iter()
            .map(|a| {
                a.then(|| {
                    k += 1;
                    k - 1
                })
            })
            .collect()
    };
    let new_gens: Vec<(i64, i64)> = (0..n).filter(|&x| alive[x]).map(|x| gens[x]).collect();
    let new_out = (0..n)
        .filter(|&x| alive[x])
        .map(|x| out[x].iter().map(|(k, v)| (map[*k as usize].unwrap(), v.clone())).collect())
        .collect();
    Reduced { gens: new_gens, out: new_out }
}

/// Rank data for the reduced complex, one homological degree at a time.
struct PageEngine<F> {
    /// Generators of each degree sorted by `j`, with their global index.
    by_degree: BTreeMap<i64, Vec<(i64, usize)>>,
    red: Reduced<F>,
    memo: FxHashMap<(i64, i64, i64), usize>,
}

impl<F: Field> PageEngine<F> {
    fn new(red: Reduced<F>) -> Self {
        let mut by_degree: BTreeMap<i64, Vec<(i64, usize)>> = BTreeMap::new();
        for (k, &(i, j)) in red.gens.iter().enumerate() {
            by_degree.entry(i).or_default().push((j, k));
        }
        for v in by_degree.values_mut() {
            v.sort_unstable();
        }
        PageEngine { by_degree, red, memo: FxHashMap::default() }
    }

    fn count(&self, i: i64, p: i64) -> usize {
        self.by_degree.get(&i).map_or(0, |v| v.iter().filter(|(j, _)| *j >= p).count())
    }

    /// Rank of `D: C_i -> C_{i+1}` on sources with `j >= p`, targets with `j < q`.
    fn block_rank(&mut self, i: i64, p: i64, q: i64) -> usize {
        if let Some(&r) = self.memo.get(&(i, p, q)) {
            return r;
        }
        let empty = Vec::new();
        let src: Vec<usize> = self.by_degree.get(&i).unwrap_or(&empty).iter().filter(|(j, _)| *j >= p).map(|x| x.1).collect();
        let dst: Vec<(i64, usize)> = self.by_degree.get(&(i + 1)).unwrap_or(&empty).clone();
        let row_of: FxHashMap<usize, usize> =
            dst.iter().filter(|(j, _)| *j < q).enumerate().map(|(r, (_, g))| (*g, r)).collect();
        let mut trip = Vec::new();
        for (c, &g) in src.iter().enumerate() {
            for (t, v) in &self.red.out[g] {
                if let Some(&r) = row_of.get(&(*t as usize)) {
                    trip.push((r, c, v.clone()));
                }
            }
        }
        let r = rank(&SparseMat::from_triplets(row_of.len(), src.len(), trip));
        self.memo.insert((i, p, q), r);
        r
    }

    /// `dim Z_r^p` in degree `i`.
    fn z(&mut self, i: i64, p: i64, r: i64) -> usize {
        self.count(i, p) - self.block_rank(i, p, p + r)
    }

    /// `dim B_r^p` in degree `i`: `F_p ∩ D(F_{p-r})`.
    fn b(&mut self, i: i64, p: i64, r: i64) -> usize {
        self.block_rank(i - 1, p - r, i64::MAX) - self.block_rank(i - 1, p - r, p)
    }

    fn e(&mut self, i: i64, p: i64, r: i64) -> usize {
        let v = self.z(i, p, r) as i64 - self.z(i, p + 1, r - 1) as i64 - self.b(i, p, r - 1) as i64
            + self.b(i, p + 1, r) as i64;
        debug_assert!(v >= 0);
        v as usize
    }

    /// Rank of `d_r` out of `(i, p)` on `E_r`.
    fn d_rank(&mut self, i: i64, p: i64, r: i64) -> usize {
        let v = self.z(i, p, r) as i64 - self.z(i, p, r + 1) as i64 - self.z(i, p + 1, r - 1) as i64
            + self.z(i, p + 1, r) as i64;
        debug_assert!(v >= 0);
        v as usize
    }
}

/// Pages of the spectral sequence of a Lee complex, from `E_1` until no
/// differential of the remaining support is possible.
pub fn compute_pages<F: Field>(c: &FilteredComplex<F>) -> Result<PageSet, LeeError> {
    if c.theory != Theory::Lee {
        return Err(LeeError::Theory);
    }
    let red = reduce(c);
    let cells: BTreeSet<(i64, i64)> = red.gens.iter().copied().collect();
    let mut eng = PageEngine::new(red);
    let mut pages: Vec<Page> = Vec::new();
    let mut n = 1usize;
    loop {
        let r = 4 * n as i64;
        let mut dims = DimTable::new();
        let mut diff_ranks = BTreeMap::new();
        for &(i, j) in &cells {
            let d = eng.e(i, j, r);
            if d > 0 {
                dims.set(i, j, d as u64);
            }
        }
        for (g, _) in dims.iter() {
            let k = eng.d_rank(g.i, g.j, r);
            if k > 0 {
                diff_ranks.insert((g.i, g.j), k);
            }
        }
        let (lo, hi) = match (dims.iter().map(|x| x.0.j).min(), dims.iter().map(|x| x.0.j).max()) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => (0, 0),
        };
        pages.push(Page { n, dims: dims.clone(), diff_ranks });
        // no room for a (1, 4m) map with m >= n + 1
        if 4 * (n as i64 + 1) > hi - lo {
            let last = pages.last().unwrap();
            let mut einf = last.dims.clone();
            for (&(i, j), &k) in &last.diff_ranks {
                einf.sub(i, j, k as u64);
                einf.sub(i + 1, j + r, k as u64);
            }
            let total = einf.total();
            if total != 2 {
                return Err(LeeError::EInfinity(total));
            }
            return Ok(PageSet { pages, e_infinity: einf });
        }
        n += 1;
    }
}

pub fn s_invariant(p: &PageSet) -> Result<i64, LeeError> {
    let cells: Vec<(i64, i64, u64)> = p.e_infinity.iter().map(|(g, d)| (g.i, g.j, d)).collect();
    match cells.as_slice() {
        [(0, j1, 1), (0, j2, 1)] if j2 - j1 == 2 => Ok((j1 + j2) / 2),
        _ => Err(LeeError::Malformed(format!("{cells:?}"))),
    }
}

/// Build the Lee complex directly and compute pages and `s`.
pub fn lee(d: &Diagram) -> Result<LeeResult, LeeError> {
    lee_with_budget(d, DEFAULT_MAX_DIRECT)
}

pub fn lee_with_budget(d: &Diagram, max_crossings: usize) -> Result<LeeResult, LeeError> {
    let c = build_complex_with_budget::<crate::Rat>(d, Theory::Lee, max_crossings)?;
    let pages = compute_pages(&c)?;
    Ok(LeeResult { s: s_invariant(&pages)?, pages })
}

/// `f_{2l}` read off the page differentials; the identity is checked.
pub fn decomposition_from_pages(p: &PageSet, kh: &Laurent2) -> Result<DecompositionFamily, LeeError> {
    let s = s_invariant(p)?;
    let mut f = BTreeMap::new();
    let mut rebuilt = Laurent2::monomial(0, s + 1, 1).add(&Laurent2::monomial(0, s - 1, 1));
    for page in &p.pages {
        let mut fl = Laurent2::zero();
        for (&(i, j), &k) in &page.diff_ranks {
            fl.add_term(i, j, k as i64);
        }
        let l = page.n as i64;
        rebuilt = rebuilt.add(&fl.mul(&Laurent2::one().add(&Laurent2::monomial(1, 4 * l, 1))));
        f.insert(page.n, fl);
    }
    if &rebuilt != kh {
        return Err(LeeError::Identity(format!("expected {kh}, rebuilt {rebuilt}")));
    }
    Ok(DecompositionFamily { s, f })
}

/// Convenience: pages, `s` and the decomposition for a small diagram.
pub fn lee_decomposition(d: &Diagram) -> Result<(LeeResult, DecompositionFamily), LeeError> {
    let res = lee(d)?;
    let kh = poincare_series(&res.pages.pages[0].dims);
    let dec = decomposition_from_pages(&res.pages, &kh)?;
    Ok((res, dec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::khcomplex::{build_complex, khovanov_homology};
    use crate::knotio::catalog_get;
    use crate::Rat;

    #[test]
    fn unknot_pages() {
        let (res, dec) = lee_decomposition(&catalog_get("unknot").unwrap()).unwrap();
        assert_eq!(res.s, 0);
        assert_eq!(res.pages.e_infinity, DimTable::from_cells([((0, -1), 1), ((0, 1), 1)]));
        assert_eq!(res.pages.last_nonzero(), 0);
        assert!(dec.f.values().all(|f| f.is_zero()));
    }

    #[test]
    fn trefoil_pages() {
        let d = catalog_get("trefoil_r").unwrap();
        let (res, dec) = lee_decomposition(&d).unwrap();
        assert_eq!(res.s, 2);
        let p1 = &res.pages.pages[0];
        assert_eq!(p1.dims, khovanov_homology(&d).unwrap());
        assert_eq!(p1.diff_ranks, BTreeMap::from([((2, 5), 1)]));
        assert_eq!(res.pages.e_infinity, DimTable::from_cells([((0, 1), 1), ((0, 3), 1)]));
        assert_eq!(dec.f[&1], Laurent2::monomial(2, 5, 1));
        let left = catalog_get("trefoil_l").unwrap();
        assert_eq!(lee(&left).unwrap().s, -2);
    }

    #[test]
    fn plain_complex_rejected() {
        let c = build_complex::<Rat>(&catalog_get("trefoil_r").unwrap(), Theory::Plain).unwrap();
        assert_eq!(compute_pages(&c), Err(LeeError::Theory));
    }

    #[test]
    fn s_of_small_knots() {
        for (name, s) in [("figure8", 0), ("5_1", 4), ("5_2", 2), ("6_1", 0), ("8_19", 6), ("8_20", 0)] {
            assert_eq!(lee(&catalog_get(name).unwrap()).unwrap().s, s, "{name}");
        }
    }
}
