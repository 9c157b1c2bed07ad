//! Exact sparse linear algebra over a [`Field`]: rank, kernel and the
//! chain-level homology dimensions of a Khovanov complex.

use std::collections::BTreeSet;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::grading::DimTable;
use crate::khcomplex::FilteredComplex;
use crate::scalar::Field;

/// Sparse matrix in sorted triplet form. No stored zeros, no duplicates.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMat<F> {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, F)>,
}

impl<F: Field> SparseMat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMat { rows, cols, entries: vec![] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMat { rows: n, cols: n, entries: (0..n).map(|k| (k, k, F::one())).collect() }
    }

    /// Duplicate positions are summed; zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, F)>) -> Self {
        let mut acc: FxHashMap<(usize, usize), F> = FxHashMap::default();
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "entry ({r},{c}) out of range {rows}x{cols}");
            if v.is_zero() {
                continue;
            }
            match acc.get_mut(&(r, c)) {
                Some(x) => *x += v,
                None => {
                    acc.insert((r, c), v);
                }
            }
        }
        let mut entries: Vec<_> = acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((r, c), v)| (r, c, v)).collect();
        entries.sort_unstable_by_key(|e| (e.0, e.1));
        SparseMat { rows, cols, entries }
    }

    pub fn from_dense(rows: &[Vec<F>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_triplets(
            r,
            c,
            rows.iter().enumerate().flat_map(|(i, row)| row.iter().enumerate().map(move |(j, v)| (i, j, v.clone()))),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, usize, F)] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> F {
        match self.entries.binary_search_by_key(&(r, c), |e| (e.0, e.1)) {
            Ok(k) => self.entries[k].2.clone(),
            Err(_) => F::zero(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.entries.iter().map(|(r, c, v)| (*c, *r, v.clone())))
    }

    /// `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut by_row: Vec<Vec<(usize, &F)>> = vec![vec![]; other.rows];
        for (r, c, v) in &other.entries {
            by_row[*r].push((*c, v));
        }
        let mut out = vec![];
        for (r, k, a) in &self.entries {
            for (c, b) in &by_row[*k] {
                out.push((*r, *c, a.clone() * (*b).clone()));
            }
        }
        Self::from_triplets(self.rows, other.cols, out)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_triplets(self.rows, self.cols, self.entries.iter().chain(other.entries.iter()).cloned())
    }

    /// Restriction to the given row and column index lists (in that order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut rmap = vec![usize::MAX; self.rows];
        for (k, &r) in rows.iter().enumerate() {
            rmap[r] = k;
        }
        let mut cmap = vec![usize::MAX; self.cols];
        for (k, &c) in cols.iter().enumerate() {
            cmap[c] = k;
        }
        let entries = self
            .entries
            .iter()
            .filter(|(r, c, _)| rmap[*r] != usize::MAX && cmap[*c] != usize::MAX)
            .map(|(r, c, v)| (rmap[*r], cmap[*c], v.clone()));
        Self::from_triplets(rows.len(), cols.len(), entries)
    }

    pub fn to_dense(&self) -> Vec<Vec<F>> {
        let mut d = vec![vec![F::zero(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            d[*r][*c] = v.clone();
        }
        d
    }

    /// Apply to a dense vector.
    pub fn apply(&self, x: &[F]) -> Vec<F> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![F::zero(); self.rows];
        for (r, c, v) in &self.entries {
            y[*r] += v.clone() * x[*c].clone();
        }
        y
    }

    /// Text triplet dump: header `rows cols nnz`, then `row col value` lines.
    pub fn dump(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, self.entries.len());
        for (r, c, v) in &self.entries {
            s.push_str(&format!("{r} {c} {v}\n"));
        }
        s
    }
}

/// Exact rank by Gaussian elimination with Markowitz-style pivoting: the
/// sparsest remaining column, then the sparsest row within it, ties broken by
/// the smallest index.
pub fn rank<F: Field>(m: &SparseMat<F>) -> usize {
    if m.is_zero() {
        return 0;
    }
    let mut rows: Vec<FxHashMap<usize, F>> = vec![FxHashMap::default(); m.rows];
    let mut cols: Vec<FxHashSet<usize>> = vec![FxHashSet::default(); m.cols];
    for (r, c, v) in &m.entries {
        rows[*r].insert(*c, v.clone());
        cols[*c].insert(*r);
    }
    let mut queued: Vec<Option<usize>> = cols.iter().map(|s| (!s.is_empty()).then_some(s.len())).collect();
    let mut queue: BTreeSet<(usize, usize)> =
        queued.iter().enumerate().filter_map(|(c, k)| k.map(|k| (k, c))).collect();
    let mut rank = 0;
    while let Some((_, pc)) = queue.pop_first() {
        queued[pc] = None;
        let pr = *cols[pc].iter().min_by_key(|&&r| (rows[r].len(), r)).expect("nonempty column");
        rank += 1;
        let prow = std::mem::take(&mut rows[pr]);
        let pinv = prow[&pc].inv();
        let mut touched: FxHashSet<usize> = FxHashSet::default();
        // the pivot row leaves every column it touches
        for c in prow.keys() {
            if *c != pc {
                cols[*c].remove(&pr);
                touched.insert(*c);
            }
        }
        let mut targets: Vec<usize> = cols[pc].iter().copied().filter(|&r| r != pr).collect();
        targets.sort_unstable();
        cols[pc].clear();
        for r in targets {
            let f = rows[r].remove(&pc).unwrap() * pinv.clone();
            for (c, v) in prow.iter() {
                if *c == pc {
                    continue;
                }
                let delta = f.clone() * v.clone();
                let row = &mut rows[r];
                match row.get_mut(c) {
                    Some(x) => {
                        *x -= delta;
                        if x.is_zero() {
                            row.remove(c);
                            cols[*c].remove(&r);
                        }
                    }
                    None => {
                        row.insert(*c, -delta);
                        cols[*c].insert(r);
                    }
                }
            }
        }
        for c in touched {
            if let Some(k) = queued[c].take() {
                queue.remove(&(k, c));
            }
            if !cols[c].is_empty() {
                queue.insert((cols[c].len(), c));
                queued[c] = Some(cols[c].len());
            }
        }
    }
    rank
}

/// Rank of the matrix with rows and columns permuted first; the answer does
/// not depend on the permutation, only the pivot sequence does.
pub fn rank_permuted<F: Field>(m: &SparseMat<F>, row_perm: &[usize], col_perm: &[usize]) -> usize {
    let p = SparseMat::from_triplets(
        m.rows,
        m.cols,
        m.entries.iter().map(|(r, c, v)| (row_perm[*r], col_perm[*c], v.clone())),
    );
    rank(&p)
}

/// Basis of the right kernel, `cols - rank` vectors.
pub fn kernel_basis<F: Field>(m: &SparseMat<F>) -> Vec<Vec<F>> {
    let mut rows: Vec<FxHashMap<usize, F>> = vec![FxHashMap::default(); m.rows];
    for (r, c, v) in &m.entries {
        rows[*r].insert(*c, v.clone());
    }
    // reduced row echelon form, pivots chosen column by column
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; m.cols];
    let mut used = vec![false; m.rows];
    for c in 0..m.cols {
        let Some(p) = (0..m.rows).find(|&r| !used[r] && rows[r].contains_key(&c)) else { continue };
        used[p] = true;
        pivot_of_col[c] = Some(p);
        let inv = rows[p][&c].inv();
        for v in rows[p].values_mut() {
            *v *= inv.clone();
        }
        let prow = rows[p].clone();
        for r in 0..m.rows {
            if r == p {
                continue;
            }
            let Some(f) = rows[r].get(&c).cloned() else { continue };
            for (k, v) in &prow {
                let x = rows[r].entry(*k).or_insert_with(F::zero);
                *x -= f.clone() * v.clone();
            }
            rows[r].retain(|_, v| !v.is_zero());
        }
    }
    let mut basis = vec![];
    for free in 0..m.cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![F::zero(); m.cols];
        v[free] = F::one();
        for (c, p) in pivot_of_col.iter().enumerate() {
            if let Some(p) = p {
                if let Some(x) = rows[*p].get(&free) {
                    v[c] = -x.clone();
                }
            }
        }
        basis.push(v);
    }
    basis
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error("differential does not square to zero at degree {0}")]
    NotAComplex(i64),
}

/// Bigraded homology dimensions of the j-preserving part of the differential.
/// The perturbation term, if any, is ignored (associated graded).
pub fn homology_dims<F: Field>(c: &FilteredComplex<F>) -> Result<DimTable, HomologyError> {
    c.check_d_squared()?;
    let mut table = DimTable::new();
    for (&i, gens) in c.generators() {
        let mut by_j: FxHashMap<i64, Vec<usize>> = FxHashMap::default();
        for (k, g) in gens.iter().enumerate() {
            by_j.entry(g.j).or_default().push(k);
        }
        let next = c.generators().get(&(i + 1));
        let prev = c.generators().get(&(i - 1));
        for (j, idx) in by_j {
            let mut dim = idx.len();
            if let (Some(d), Some(next)) = (c.d0(i), next) {
                let rows: Vec<usize> = (0..next.len()).filter(|&k| next[k].j == j).collect();
                dim -= rank(&d.submatrix(&rows, &idx));
            }
            if let (Some(d), Some(prev)) = (c.d0(i - 1), prev) {
                let cols: Vec<usize> = (0..prev.len()).filter(|&k| prev[k].j == j).collect();
                dim -= rank(&d.submatrix(&idx, &cols));
            }
            table.add(i, j, dim as u64);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Fp, Rat};
    use num_traits::Zero;
    use proptest::prelude::*;

    type M = SparseMat<Rat>;

    fn int_matrix(rows: &[&[i64]]) -> M {
        SparseMat::from_dense(&rows.iter().map(|r| r.iter().map(|&x| Rat::integer(x)).collect()).collect::<Vec<_>>())
    }

    // Determinant by cofactor expansion along the first row.
    fn det(m: &[Vec<Rat>]) -> Rat {
        let n = m.len();
        if n == 0 {
            return Rat::integer(1);
        }
        let mut acc = Rat::integer(0);
        for c in 0..n {
            if m[0][c].is_zero() {
                continue;
            }
            let minor: Vec<Vec<Rat>> =
                m[1..].iter().map(|row| row.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, v)| v.clone()).collect()).collect();
            let term = m[0][c].clone() * det(&minor);
            acc = if c % 2 == 0 { acc + term } else { acc - term };
        }
        acc
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = subsets(n - 1, k);
        for mut s in subsets(n - 1, k - 1) {
            s.push(n - 1);
            out.push(s);
        }
        out
    }

    // Largest k with a nonvanishing k x k minor.
    fn minor_rank(m: &M) -> usize {
        let d = m.to_dense();
        for k in (1..=m.rows().min(m.cols())).rev() {
            for rs in subsets(m.rows(), k) {
                for cs in subsets(m.cols(), k) {
                    let sub: Vec<Vec<Rat>> = rs.iter().map(|&r| cs.iter().map(|&c| d[r][c].clone()).collect()).collect();
                    if !det(&sub).is_zero() {
                        return k;
                    }
                }
            }
        }
        0
    }

    #[test]
    fn rank_basics() {
        assert_eq!(rank(&M::zeros(4, 5)), 0);
        assert_eq!(rank(&M::identity(7)), 7);
        assert_eq!(rank(&int_matrix(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]])), 2);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&M::zeros(3, 3)).len(), 3);
        assert!(kernel_basis(&M::identity(4)).is_empty());
        let k = kernel_basis(&int_matrix(&[&[1, 1], &[1, 1]]));
        assert_eq!(k.len(), 1);
        assert_eq!(k[0][0].clone() + k[0][1].clone(), Rat::integer(0));
        assert!(!k[0][0].is_zero());
    }

    #[test]
    fn six_by_six_against_minors() {
        // frozen sample with a known dependency: row 5 = row 0 + 2 row 1 - row 3
        let m = int_matrix(&[
            &[1, 0, 2, -1, 3, 0],
            &[0, 1, 1, 0, -2, 4],
            &[2, 2, 0, 1, 1, 1],
            &[3, -1, 0, 2, 0, 5],
            &[0, 0, 1, 1, 1, 1],
            &[-2, 3, 4, -3, -1, 3],
        ]);
        assert_eq!(minor_rank(&m), 5);
        assert_eq!(rank(&m), 5);
    }

    #[test]
    fn prime_field_agrees_on_small_integers() {
        let m = int_matrix(&[&[2, 4], &[1, 2]]);
        let p: SparseMat<Fp<1_000_003>> =
            SparseMat::from_triplets(2, 2, m.entries().iter().map(|(r, c, v)| (*r, *c, Fp::new(v.numer().try_into().unwrap()))));
        assert_eq!(rank(&p), rank(&m));
    }

    fn small_matrix() -> impl Strategy<Value = M> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(prop_oneof![3 => Just(0i64), 2 => -3i64..4], r * c).prop_map(move |v| {
                SparseMat::from_triplets(r, c, v.iter().enumerate().map(|(k, &x)| (k / c, k % c, Rat::integer(x))))
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_matrix()) {
            prop_assert_eq!(rank(&m) + kernel_basis(&m).len(), m.cols());
            for v in kernel_basis(&m) {
                prop_assert!(m.apply(&v).iter().all(|x| x.is_zero()));
            }
        }

        #[test]
        fn rank_transpose_and_minors(m in small_matrix()) {
            let r = rank(&m);
            prop_assert_eq!(r, rank(&m.transpose()));
            prop_assert_eq!(r, minor_rank(&m));
        }

        #[test]
        fn pivot_order_independent(m in small_matrix(), seed in any::<u64>()) {
            let mut rp: Vec<usize> = (0..m.rows()).collect();
            let mut cp: Vec<usize> = (0..m.cols()).collect();
            let mut s = seed;
            for v in [&mut rp, &mut cp] {
                for k in (1..v.len()).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    v.swap(k, (s >> 33) as usize % (k + 1));
                }
            }
            prop_assert_eq!(rank_permuted(&m, &rp, &cp), rank(&m));
        }
    }
}
