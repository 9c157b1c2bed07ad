//! Knight-move audits of a Khovanov table, forced higher differentials,
//! Alexander polynomial and the Fox–Milnor test.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grading::{poincare_series, Bigrading, DimTable, Laurent1, Laurent2};
use crate::knotio::{Diagram, EdgeId, Sign};
use crate::lee::PageSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AuditError {
    #[error("negative coefficient at t^{0}q^{1}")]
    Negative(i64, i64),
    #[error("even quantum grading at t^{0}q^{1}")]
    EvenQ(i64, i64),
    #[error("s must be even, got {0}")]
    OddS(i64),
    #[error("pawn pair at (0, {0}) and (0, {1}) is missing")]
    NoPawn(i64, i64),
    #[error("diagram has {0} components, a knot is required")]
    NotAKnot(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: usize,
    pub source: Bigrading,
    pub target: Bigrading,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnightMoveReport {
    pub verdict: Verdict,
    pub s: i64,
    /// `f_2` when the decomposition exists.
    pub f2: Option<Laurent2>,
    pub witness: Option<Bigrading>,
    pub reason: Option<String>,
    pub certificates: Vec<Certificate>,
}

impl KnightMoveReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "verdict": self.verdict,
            "s": self.s,
            "f2": self.f2.as_ref().map(|f| f.to_string()),
            "witness": self.witness,
            "reason": self.reason,
            "certificates": self.certificates,
        })
    }
}

fn check_series(kh: &Laurent2, s: i64) -> Result<(), AuditError> {
    if s % 2 != 0 {
        return Err(AuditError::OddS(s));
    }
    for ((i, j), c) in kh.terms() {
        if c < 0 {
            return Err(AuditError::Negative(i, j));
        }
        if j % 2 == 0 {
            return Err(AuditError::EvenQ(i, j));
        }
    }
    Ok(())
}

/// Solve `kh - q^s (q + q^-1) = f (1 + t q^4)` by the recurrence
/// `f(i, j) = R(i, j) - f(i - 1, j - 4)`, sweeping `i` upwards.
pub fn knight_move_solve(kh: &Laurent2, s: i64) -> Result<KnightMoveReport, AuditError> {
    check_series(kh, s)?;
    let r = kh.sub(&Laurent2::monomial(0, s + 1, 1)).sub(&Laurent2::monomial(0, s - 1, 1));
    let mut report =
        KnightMoveReport { verdict: Verdict::Holds, s, f2: None, witness: None, reason: None, certificates: vec![] };
    let Some(imin) = r.terms().map(|((i, _), _)| i).min() else {
        report.f2 = Some(Laurent2::zero());
        return Ok(report);
    };
    let imax = r.terms().map(|((i, _), _)| i).max().unwrap();
    let mut f: BTreeMap<(i64, i64), i64> = BTreeMap::new();
    for i in imin..=imax + 1 {
        // cells of column i reachable from R or from f one step back
        let js: BTreeSet<i64> = r
            .terms()
            .filter(|((ii, _), _)| *ii == i)
            .map(|((_, j), _)| j)
            .chain(f.keys().filter(|(ii, _)| *ii == i - 1).map(|(_, j)| j + 4))
            .collect();
        for j in js {
            let v = r.coeff(i, j) - f.get(&(i - 1, j - 4)).copied().unwrap_or(0);
            if v < 0 {
                report.verdict = Verdict::Fails;
                if r.coeff(i, j) < 0 {
                    report.witness = Some(Bigrading::new(i, j));
                    report.reason = Some("pawn pair missing".into());
                } else {
                    report.witness = Some(Bigrading::new(i - 1, j - 4));
                    report.reason =
                        Some(format!("class at ({}, {}) has no partner at ({i}, {j}) or ({}, {})", i - 1, j - 4, i - 2, j - 8));
                }
                return Ok(report);
            }
            if v > 0 {
                f.insert((i, j), v);
            }
        }
    }
    let f2 = Laurent2::from_terms(f.into_iter());
    debug_assert_eq!(f2.mul(&Laurent2::one().add(&Laurent2::monomial(1, 4, 1))), r);
    report.f2 = Some(f2);
    Ok(report)
}

/// Maximum matching of unit classes `(i, j) ~ (i + 1, j + 4)` after removing
/// one pawn pair; returns the unmatched units.
pub fn max_knight_matching(kh: &DimTable, s: i64) -> Result<DimTable, AuditError> {
    let mut t = kh.clone();
    if t.get(0, s - 1) == 0 || t.get(0, s + 1) == 0 {
        return Err(AuditError::NoPawn(s - 1, s + 1));
    }
    t.sub(0, s - 1, 1);
    t.sub(0, s + 1, 1);
    let cells: Vec<(i64, i64, u64)> = t.iter().map(|(g, d)| (g.i, g.j, d)).collect();
    let index: FxHashMap<(i64, i64), usize> = cells.iter().enumerate().map(|(k, c)| ((c.0, c.1), k)).collect();
    // bipartite by parity of i; source -> even cells -> odd cells -> sink
    let n = cells.len() + 2;
    let (src, snk) = (n - 2, n - 1);
    let mut g = FlowGraph::new(n);
    for (k, &(i, j, d)) in cells.iter().enumerate() {
        if i.rem_euclid(2) == 0 {
            g.add_edge(src, k, d as i64);
            for (ni, nj) in [(i + 1, j + 4), (i - 1, j - 4)] {
                if let Some(&m) = index.get(&(ni, nj)) {
                    g.add_edge(k, m, i64::MAX / 4);
                }
            }
        } else {
            g.add_edge(k, snk, d as i64);
        }
    }
    g.max_flow(src, snk);
    let mut left = DimTable::new();
    for (k, &(i, j, d)) in cells.iter().enumerate() {
        let used = if i.rem_euclid(2) == 0 { g.flow_on(src, k) } else { g.flow_on(k, snk) };
        let rest = d - used as u64;
        if rest > 0 {
            left.set(i, j, rest);
        }
    }
    Ok(left)
}

/// Dinic max-flow on a small graph.
struct FlowGraph {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
    orig: Vec<i64>,
}

impl FlowGraph {
    fn new(n: usize) -> Self {
        FlowGraph { adj: vec![vec![]; n], to: vec![], cap: vec![], orig: vec![] }
    }

    fn add_edge(&mut self, a: usize, b: usize, c: i64) {
        for (x, y, cc) in [(a, b, c), (b, a, 0)] {
            self.adj[x].push(self.to.len());
            self.to.push(y);
            self.cap.push(cc);
            self.orig.push(cc);
        }
    }

    fn flow_on(&self, a: usize, b: usize) -> i64 {
        self.adj[a].iter().filter(|&&e| self.to[e] == b && self.orig[e] > 0).map(|&e| self.orig[e] - self.cap[e]).sum()
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            let mut level = vec![-1i64; self.adj.len()];
            level[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &e in &self.adj[u] {
                    if self.cap[e] > 0 && level[self.to[e]] < 0 {
                        level[self.to[e]] = level[u] + 1;
                        q.push_back(self.to[e]);
                    }
                }
            }
            if level[t] < 0 {
                return total;
            }
            let mut it = vec![0usize; self.adj.len()];
            loop {
                let f = self.push(s, t, i64::MAX, &level, &mut it);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }

    fn push(&mut self, u: usize, t: usize, limit: i64, level: &[i64], it: &mut [usize]) -> i64 {
        if u == t {
            return limit;
        }
        while it[u] < self.adj[u].len() {
            let e = self.adj[u][it[u]];
            let v = self.to[e];
            if self.cap[e] > 0 && level[v] == level[u] + 1 {
                let f = self.push(v, t, limit.min(self.cap[e]), level, it);
                if f > 0 {
                    self.cap[e] -= f;
                    self.cap[e ^ 1] += f;
                    return f;
                }
            }
            it[u] += 1;
        }
        0
    }
}

/// For every class left over by the knight matching, list the page
/// differentials `d_n` (`n >= 2`) that could cancel it given the support of
/// `kh`; a class with exactly one option forces that `d_n` to be nonzero.
pub fn higher_diff_certificate(kh: &DimTable, s: i64) -> Vec<Certificate> {
    let Ok(left) = max_knight_matching(kh, s) else { return vec![] };
    let (jmin, jmax) = match (kh.iter().map(|x| x.0.j).min(), kh.iter().map(|x| x.0.j).max()) {
        (Some(a), Some(b)) => (a, b),
        _ => return vec![],
    };
    let span = jmax - jmin;
    let mut out: Vec<Certificate> = Vec::new();
    for (g, _) in left.iter() {
        let mut options = Vec::new();
        for n in 2..=(span / 4).max(2) as usize {
            let up = Bigrading::new(g.i + 1, g.j + 4 * n as i64);
            let down = Bigrading::new(g.i - 1, g.j - 4 * n as i64);
            if kh.get(up.i, up.j) > 0 {
                options.push(Certificate { n, source: g, target: up });
            }
            if kh.get(down.i, down.j) > 0 {
                options.push(Certificate { n, source: down, target: g });
            }
        }
        if let [only] = options.as_slice() {
            if !out.contains(only) {
                out.push(only.clone());
            }
        }
    }
    out
}

/// Knight-move verdict plus forced higher differentials for a table.
pub fn audit_table(kh: &DimTable, s: i64) -> Result<KnightMoveReport, AuditError> {
    let mut rep = knight_move_solve(&poincare_series(kh), s)?;
    if !rep.holds() {
        rep.certificates = higher_diff_certificate(kh, s);
    }
    Ok(rep)
}

/// Guess `s` from a table alone: among even `s` with a pawn pair at
/// `(0, s ± 1)`, prefer one where the knight-move decomposition exists, then
/// the one leaving fewest unmatched classes. `None` when that is ambiguous.
pub fn infer_s(kh: &DimTable) -> Option<i64> {
    let mut best: Vec<(bool, u64, i64)> = Vec::new();
    for (g, _) in kh.iter().filter(|(g, _)| g.i == 0) {
        let s = g.j + 1;
        if kh.get(0, s + 1) == 0 {
            continue;
        }
        let holds = knight_move_solve(&poincare_series(kh), s).is_ok_and(|r| r.holds());
        let left = max_knight_matching(kh, s).map_or(u64::MAX, |t| t.total());
        best.push((!holds, left, s));
    }
    best.sort_unstable();
    match best.as_slice() {
        [a, b, ..] if (a.0, a.1) == (b.0, b.1) => None,
        [a, ..] => Some(a.2),
        [] => None,
    }
}

/// `2N - 1` for the largest `N` with `d_N != 0`, else 0.
pub fn unknotting_lower_bound(p: &PageSet) -> usize {
    bound_from_n(p.last_nonzero())
}

/// Same bound from forced differentials of a table-level audit.
pub fn unknotting_bound_from_certificates(certs: &[Certificate]) -> usize {
    bound_from_n(certs.iter().map(|c| c.n).max().unwrap_or(0))
}

fn bound_from_n(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        2 * n - 1
    }
}

// ---------------------------------------------------------------------------
// Alexander polynomial

type Poly = Vec<BigInt>;

fn poly_trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_trim(out)
}

fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] -= x;
    }
    poly_trim(out)
}

/// Exact division in `Z[t]`; the divisor must divide.
fn poly_div(a: &Poly, b: &Poly) -> Poly {
    let mut rem = a.clone();
    if rem.is_empty() {
        return vec![];
    }
    let db = b.len() - 1;
    let lead = b.last().unwrap();
    let mut q = vec![BigInt::zero(); rem.len().saturating_sub(db)];
    while rem.len() > db && !rem.is_empty() {
        let k = rem.len() - 1 - db;
        let (c, r) = rem.last().unwrap().div_rem(lead);
        assert!(r.is_zero(), "inexact polynomial division");
        for (i, x) in b.iter().enumerate() {
            rem[k + i] -= &c * x;
        }
        q[k] = c;
        rem = poly_trim(rem);
    }
    assert!(rem.is_empty(), "inexact polynomial division");
    poly_trim(q)
}

/// Fraction-free determinant over `Z[t]`.
fn bareiss(mut m: Vec<Vec<Poly>>) -> Poly {
    let n = m.len();
    if n == 0 {
        return vec![BigInt::one()];
    }
    let mut sign = 1;
    let mut prev: Poly = vec![BigInt::one()];
    for k in 0..n {
        if m[k][k].is_empty() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_empty()) else { return vec![] };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = poly_sub(&poly_mul(&m[i][j], &m[k][k]), &poly_mul(&m[i][k], &m[k][j]));
                m[i][j] = poly_div(&v, &prev);
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        d.into_iter().map(|c| -c).collect()
    } else {
        d
    }
}

/// Rows of the Fox matrix of the Wirtinger presentation, one per crossing,
/// with entries as `(arc, polynomial in t)`. Arcs are numbered by smallest edge.
fn fox_rows(d: &Diagram) -> (usize, Vec<Vec<(usize, Poly)>>) {
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
    for x in d.crossings() {
        let (a, b) = (find(&mut parent, index[&x.edges[1]]), find(&mut parent, index[&x.edges[3]]));
        parent[a] = b;
    }
    let mut arc_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    for k in 0..edges.len() {
        let r = find(&mut parent, k);
        let next = arc_of_root.len();
        arc_of_root.entry(r).or_insert(next);
    }
    let arc = |e: EdgeId, p: &mut Vec<usize>| arc_of_root[&find(p, index[&e])];
    let int = |v: i64| BigInt::from(v);
    let mut rows = Vec::new();
    for x in d.crossings() {
        let (over, inc, out) = (arc(x.edges[1], &mut parent), arc(x.edges[0], &mut parent), arc(x.edges[2], &mut parent));
        let row = match x.sign {
            Sign::Positive => vec![(over, vec![int(1), int(-1)]), (inc, vec![int(0), int(1)]), (out, vec![int(-1)])],
            Sign::Negative => vec![(over, vec![int(-1), int(1)]), (inc, vec![int(1)]), (out, vec![int(0), int(-1)])],
        };
        rows.push(row);
    }
    (arc_of_root.len(), rows)
}

/// Alexander polynomial, normalized symmetric with `Δ(1) = 1` when possible.
pub fn alexander_polynomial(d: &Diagram) -> Result<Laurent1, AuditError> {
    if !d.is_knot() {
        return Err(AuditError::NotAKnot(d.components()));
    }
    let n = d.crossing_count();
    if n == 0 {
        return Ok(Laurent1::one());
    }
    let (arcs, rows) = fox_rows(d);
    let size = arcs - 1;
    let mut m: Vec<Vec<Poly>> = vec![vec![vec![]; size]; size];
    for (r, row) in rows.iter().take(size).enumerate() {
        for (a, p) in row {
            if *a < size {
                let cur = std::mem::take(&mut m[r][*a]);
                m[r][*a] = poly_sub(&cur, &poly_sub(&vec![], p));
            }
        }
    }
    let det = bareiss(m);
    let terms: Vec<(i64, i64)> = det
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e, c)| (e as i64, c.to_i64().expect("Alexander coefficient fits in i64")))
        .collect();
    Ok(normalize_alexander(Laurent1::from_terms(terms)))
}

/// Shift to the symmetric representative and fix the sign by `Δ(1) > 0`.
pub fn normalize_alexander(p: Laurent1) -> Laurent1 {
    let (Some(lo), Some(hi)) = (p.min_exp(), p.max_exp()) else { return p };
    let mut q = p.shift(-(lo + hi).div_euclid(2));
    if q.eval(1).is_some_and(|v| v < 0) || (q.eval(1) == Some(0) && q.coeff(q.max_exp().unwrap()) < 0) {
        q = q.scale(-1);
    }
    q
}

/// `|Δ(-1)|` by an integer determinant; cheap screen for searches.
pub fn determinant(d: &Diagram) -> u64 {
    if d.crossing_count() == 0 {
        return 1;
    }
    let (arcs, rows) = fox_rows(d);
    let size = arcs - 1;
    let mut m: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); size]; size];
    for (r, row) in rows.iter().take(size).enumerate() {
        for (a, p) in row {
            if *a < size {
                let mut v = BigInt::zero();
                let mut pw = BigInt::one();
                for c in p {
                    v += c * &pw;
                    pw = -pw;
                }
                m[r][*a] += v;
            }
        }
    }
    let polys: Vec<Vec<Poly>> = m.into_iter().map(|r| r.into_iter().map(|c| poly_trim(vec![c])).collect()).collect();
    let det = bareiss(polys);
    det.first().map_or(0, |c| c.abs().to_u64().unwrap_or(u64::MAX))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FoxMilnor {
    /// `Δ ≐ f(t) f(t^-1)`, with `f` given by its coefficients from `t^0`.
    Passes(Vec<i64>),
    /// Exhaustive search found no factor.
    Fails { span: i64 },
    /// Span beyond the configured bound; no verdict.
    Undecided { span: i64, bound: i64 },
}

pub const DEFAULT_FOX_MILNOR_SPAN: i64 = 8;

pub fn fox_milnor(delta: &Laurent1) -> FoxMilnor {
    fox_milnor_with_bound(delta, DEFAULT_FOX_MILNOR_SPAN)
}

/// Exhaustive search for `f` of degree `span/2` with `f(t) f(t^-1) = ±Δ`.
/// The middle coefficient of `f(t) f(t^-1)` is `sum a_k^2`, which bounds
/// every coefficient.
pub fn fox_milnor_with_bound(delta: &Laurent1, bound: i64) -> FoxMilnor {
    let delta = normalize_alexander(delta.clone());
    let (Some(lo), Some(hi)) = (delta.min_exp(), delta.max_exp()) else { return FoxMilnor::Fails { span: 0 } };
    let span = hi - lo;
    if span > bound {
        return FoxMilnor::Undecided { span, bound };
    }
    if span % 2 != 0 {
        return FoxMilnor::Fails { span };
    }
    let deg = (span / 2) as usize;
    let mid = delta.coeff((lo + hi) / 2);
    for sign in [1i64, -1] {
        let target = delta.scale(sign);
        let norm = mid * sign;
        if norm <= 0 {
            continue;
        }
        let cap = (norm as f64).sqrt() as i64 + 1;
        let mut a = vec![0i64; deg + 1];
        if let Some(f) = search(&mut a, 0, norm, cap, &target) {
            return FoxMilnor::Passes(f);
        }
    }
    FoxMilnor::Fails { span }
}

fn search(a: &mut Vec<i64>, k: usize, left: i64, cap: i64, target: &Laurent1) -> Option<Vec<i64>> {
    if k == a.len() {
        if left != 0 || a[0] == 0 || a[a.len() - 1] == 0 {
            return None;
        }
        let f = Laurent1::from_terms(a.iter().enumerate().map(|(e, c)| (e as i64, *c)));
        let prod = normalize_alexander(f.mul(&f.reflect()));
        let t = normalize_alexander(target.clone());
        return (prod == t || prod == t.scale(-1)).then(|| a.clone());
    }
    for v in -cap..=cap {
        if v * v > left {
            continue;
        }
        a[k] = v;
        if let Some(f) = search(a, k + 1, left - v * v, cap, target) {
            return Some(f);
        }
    }
    a[k] = 0;
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlexanderResult {
    pub delta: Laurent1,
    pub fox_milnor: FoxMilnor,
}

pub fn alexander(d: &Diagram) -> Result<AlexanderResult, AuditError> {
    let delta = alexander_polynomial(d)?;
    let fox_milnor = fox_milnor(&delta);
    Ok(AlexanderResult { delta, fox_milnor })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knotio::catalog_get;

    fn lp(terms: &[(i64, i64)]) -> Laurent1 {
        Laurent1::from_terms(terms.iter().copied())
    }

    fn series(cells: &[((i64, i64), u64)]) -> Laurent2 {
        poincare_series(&DimTable::from_cells(cells.iter().copied()))
    }

    #[test]
    fn knight_move_examples() {
        let u = knight_move_solve(&series(&[((0, -1), 1), ((0, 1), 1)]), 0).unwrap();
        assert!(u.holds());
        assert!(u.f2.unwrap().is_zero());
        let t = knight_move_solve(&series(&[((0, 1), 1), ((0, 3), 1), ((2, 5), 1), ((3, 9), 1)]), 2).unwrap();
        assert_eq!(t.f2, Some(Laurent2::monomial(2, 5, 1)));
        let wrong_s = knight_move_solve(&series(&[((0, -1), 1), ((0, 1), 1)]), 2).unwrap();
        assert_eq!(wrong_s.verdict, Verdict::Fails);
        assert_eq!(wrong_s.reason.as_deref(), Some("pawn pair missing"));
        assert_eq!(knight_move_solve(&series(&[]), 1), Err(AuditError::OddS(1)));
        assert!(matches!(knight_move_solve(&Laurent2::monomial(0, 2, 1), 0), Err(AuditError::EvenQ(0, 2))));
    }

    #[test]
    fn unpaired_class_is_witness() {
        let t = series(&[((0, -1), 1), ((0, 1), 1), ((1, 1), 1), ((2, 9), 1)]);
        let rep = audit_table(&DimTable::from_cells([((0, -1), 1), ((0, 1), 1), ((1, 1), 1), ((2, 9), 1)]), 0).unwrap();
        assert_eq!(knight_move_solve(&t, 0).unwrap().witness, Some(Bigrading::new(1, 1)));
        assert_eq!(rep.certificates, vec![Certificate { n: 2, source: Bigrading::new(1, 1), target: Bigrading::new(2, 9) }]);
        assert_eq!(unknotting_bound_from_certificates(&rep.certificates), 3);
        let t = DimTable::from_cells([((0, 1), 1), ((0, 3), 1), ((2, 5), 1), ((3, 9), 1)]);
        assert_eq!(infer_s(&t), Some(2));
    }

    #[test]
    fn matching_examples() {
        let u = DimTable::from_cells([((0, -1), 1), ((0, 1), 1)]);
        assert!(max_knight_matching(&u, 0).unwrap().is_empty());
        let t = DimTable::from_cells([((0, 1), 1), ((0, 3), 1), ((2, 5), 1), ((3, 9), 1)]);
        assert!(max_knight_matching(&t, 2).unwrap().is_empty());
        assert!(higher_diff_certificate(&t, 2).is_empty());
        assert_eq!(max_knight_matching(&t, 0), Err(AuditError::NoPawn(-1, 1)));
        // a chain 1-2-1 matches completely
        let c = DimTable::from_cells([((0, -1), 1), ((0, 1), 1), ((1, 3), 1), ((2, 7), 2), ((3, 11), 1)]);
        assert!(max_knight_matching(&c, 0).unwrap().is_empty());
    }

    #[test]
    fn alexander_small_knots() {
        let cases: &[(&str, &[(i64, i64)])] = &[
            ("unknot", &[(0, 1)]),
            ("unknot_r1", &[(0, 1)]),
            ("unknot_r2", &[(0, 1)]),
            ("trefoil_r", &[(-1, 1), (0, -1), (1, 1)]),
            ("trefoil_l", &[(-1, 1), (0, -1), (1, 1)]),
            ("trefoil_r_braid", &[(-1, 1), (0, -1), (1, 1)]),
            ("figure8", &[(-1, -1), (0, 3), (1, -1)]),
            ("figure8_braid", &[(-1, -1), (0, 3), (1, -1)]),
            ("5_1", &[(-2, 1), (-1, -1), (0, 1), (1, -1), (2, 1)]),
            ("5_2", &[(-1, 2), (0, -3), (1, 2)]),
            ("6_1", &[(-1, -2), (0, 5), (1, -2)]),
            ("6_2", &[(-2, -1), (-1, 3), (0, -3), (1, 3), (2, -1)]),
            ("6_3", &[(-2, 1), (-1, -3), (0, 5), (1, -3), (2, 1)]),
            ("8_19", &[(-3, 1), (-2, -1), (0, 1), (2, -1), (3, 1)]),
            ("8_20", &[(-2, 1), (-1, -2), (0, 3), (1, -2), (2, 1)]),
            ("8_21", &[(-2, -1), (-1, 4), (0, -5), (1, 4), (2, -1)]),
            ("10_124", &[(-4, 1), (-3, -1), (-1, 1), (0, -1), (1, 1), (3, -1), (4, 1)]),
        ];
        for (name, want) in cases {
            let d = catalog_get(name).unwrap();
            assert_eq!(alexander_polynomial(&d).unwrap(), lp(want), "{name}");
            let det: i64 = want.iter().map(|(e, c)| if e % 2 == 0 { *c } else { -c }).sum();
            assert_eq!(determinant(&d), det.unsigned_abs(), "{name}");
        }
    }

    #[test]
    fn fox_milnor_examples() {
        assert!(matches!(fox_milnor(&Laurent1::one()), FoxMilnor::Passes(f) if f.len() == 1));
        assert_eq!(fox_milnor(&lp(&[(-1, 1), (0, -1), (1, 1)])), FoxMilnor::Fails { span: 2 });
        assert_eq!(fox_milnor(&lp(&[(-1, -3), (0, 7), (1, -3)])), FoxMilnor::Fails { span: 2 });
        match fox_milnor(&lp(&[(-1, -1), (0, 2), (1, -1)])) {
            FoxMilnor::Passes(f) => assert!(f == vec![-1, 1] || f == vec![1, -1]),
            other => panic!("{other:?}"),
        }
        // 6_1 is slice: 2 - 5t + 2t^2 = (2t - 1)(t - 2) up to units
        assert!(matches!(fox_milnor(&lp(&[(-1, -2), (0, 5), (1, -2)])), FoxMilnor::Passes(_)));
        let wide = lp(&[(-5, 1), (0, -1), (5, 1)]);
        assert_eq!(fox_milnor(&wide), FoxMilnor::Undecided { span: 10, bound: 8 });
    }
}
