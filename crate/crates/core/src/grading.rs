//! Bigraded dimension tables, Laurent polynomials and the Kauffman-bracket
//! Jones polynomial.
//!
//! Jones convention: unnormalized, unknot = q + q^-1, right trefoil =
//! q + q^3 + q^5 - q^9. The bracket is evaluated in A with
//! `<X> = A <0-smoothing> + A^-1 <1-smoothing>`, loop value `-A^2 - A^-2`,
//! multiplied by `(-A^3)^-w` and mapped to q by `A^2 -> -q^-1`.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::knotio::{scan_order, Diagram};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Bigrading {
    pub i: i64,
    pub j: i64,
}

impl Bigrading {
    pub fn new(i: i64, j: i64) -> Self {
        Bigrading { i, j }
    }
}

impl fmt::Display for Bigrading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("table JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("table CSV line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("negative dimension at {0}")]
    Negative(Bigrading),
}

/// Finite map from bigradings to positive dimensions. Zeros are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DimTable {
    cells: BTreeMap<(i64, i64), u64>,
}

#[derive(Serialize, Deserialize)]
struct Cell {
    i: i64,
    j: i64,
    dim: u64,
}

impl DimTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, i: i64, j: i64) -> u64 {
        self.cells.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn set(&mut self, i: i64, j: i64, dim: u64) {
        if dim == 0 {
            self.cells.remove(&(i, j));
        } else {
            self.cells.insert((i, j), dim);
        }
    }

    pub fn add(&mut self, i: i64, j: i64, dim: u64) {
        let v = self.get(i, j) + dim;
        self.set(i, j, v);
    }

    /// Subtract, panicking if the cell would go negative.
    pub fn sub(&mut self, i: i64, j: i64, dim: u64) {
        let v = self.get(i, j);
        assert!(v >= dim, "dimension underflow at ({i},{j})");
        self.set(i, j, v - dim);
    }

    pub fn iter(&self) -> impl Iterator<Item = (Bigrading, u64)> + '_ {
        self.cells.iter().map(|(&(i, j), &d)| (Bigrading { i, j }, d))
    }

    /// Number of nonzero cells.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.cells.values().sum()
    }

    pub fn from_cells(cells: impl IntoIterator<Item = ((i64, i64), u64)>) -> Self {
        let mut t = DimTable::new();
        for ((i, j), d) in cells {
            t.add(i, j, d);
        }
        t
    }

    /// `(i, j) -> (-i, -j)`.
    pub fn mirrored(&self) -> DimTable {
        DimTable::from_cells(self.cells.iter().map(|(&(i, j), &d)| ((-i, -j), d)))
    }

    pub fn to_json(&self) -> String {
        let cells: Vec<Cell> = self.iter().map(|(b, dim)| Cell { i: b.i, j: b.j, dim }).collect();
        serde_json::to_string_pretty(&cells).expect("serializable")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let cells: Vec<Cell> = self.iter().map(|(b, dim)| Cell { i: b.i, j: b.j, dim }).collect();
        serde_json::to_value(cells).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<DimTable, TableError> {
        let cells: Vec<Cell> = serde_json::from_str(text)?;
        Ok(Self::from_cells(cells.into_iter().map(|c| ((c.i, c.j), c.dim))))
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<DimTable, TableError> {
        let cells: Vec<Cell> = serde_json::from_value(v.clone())?;
        Ok(Self::from_cells(cells.into_iter().map(|c| ((c.i, c.j), c.dim))))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("i,j,dim\n");
        for (b, d) in self.iter() {
            let _ = writeln!(s, "{},{},{}", b.i, b.j, d);
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<DimTable, TableError> {
        let mut t = DimTable::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (n == 0 && line.starts_with('i')) {
                continue;
            }
            let parts: Vec<_> = line.split(',').map(str::trim).collect();
            let bad = |msg: &str| TableError::Csv { line: n + 1, msg: msg.into() };
            if parts.len() != 3 {
                return Err(bad("expected i,j,dim"));
            }
            let i = parts[0].parse().map_err(|_| bad("bad i"))?;
            let j = parts[1].parse().map_err(|_| bad("bad j"))?;
            let d: i64 = parts[2].parse().map_err(|_| bad("bad dim"))?;
            if d < 0 {
                return Err(TableError::Negative(Bigrading { i, j }));
            }
            t.add(i, j, d as u64);
        }
        Ok(t)
    }

    /// Grid with `i` across (ascending) and `j` down (descending, odd steps).
    /// Cells in `marked` get a trailing `*`.
    pub fn render_grid(&self, marked: &[Bigrading]) -> String {
        if self.is_empty() {
            return String::from("(empty)\n");
        }
        let imin = self.cells.keys().map(|k| k.0).min().unwrap();
        let imax = self.cells.keys().map(|k| k.0).max().unwrap();
        let jmin = self.cells.keys().map(|k| k.1).min().unwrap();
        let jmax = self.cells.keys().map(|k| k.1).max().unwrap();
        let w = 4;
        let mut s = String::new();
        let _ = write!(s, "{:>5} |", "j\\i");
        for i in imin..=imax {
            let _ = write!(s, "{:>w$}", i);
        }
        s.push('\n');
        let _ = writeln!(s, "{}", "-".repeat(7 + w * (imax - imin + 1) as usize));
        let mut j = jmax;
        while j >= jmin {
            let _ = write!(s, "{:>5} |", j);
            for i in imin..=imax {
                let d = self.get(i, j);
                let mark = if marked.contains(&Bigrading { i, j }) { "*" } else { "" };
                if d == 0 {
                    let _ = write!(s, "{:>w$}", "");
                } else {
                    let _ = write!(s, "{:>w$}", format!("{d}{mark}"));
                }
            }
            s.push('\n');
            j -= 2;
        }
        s
    }

    /// Inverse of [`DimTable::render_grid`].
    pub fn parse_grid(text: &str) -> Option<DimTable> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next()?;
        if header.trim() == "(empty)" {
            return Some(DimTable::new());
        }
        let (_, cols) = header.split_once('|')?;
        let is: Vec<i64> = cols.split_whitespace().map(|x| x.parse().ok()).collect::<Option<_>>()?;
        let w = 4;
        let mut t = DimTable::new();
        for line in lines {
            let Some((jpart, rest)) = line.split_once('|') else { continue };
            let Ok(j) = jpart.trim().parse::<i64>() else { continue };
            for (k, &i) in is.iter().enumerate() {
                let cell = rest.get(k * w..((k + 1) * w).min(rest.len())).unwrap_or("");
                let cell = cell.trim().trim_end_matches('*');
                if !cell.is_empty() {
                    t.add(i, j, cell.parse().ok()?);
                }
            }
        }
        Some(t)
    }
}

// ---------------------------------------------------------------------------

/// Laurent polynomial in one variable with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Laurent1 {
    coeffs: BTreeMap<i64, i64>,
}

impl Laurent1 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn monomial(e: i64, c: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: i64, c: i64) {
        if c == 0 {
            return;
        }
        let v = self.coeffs.entry(e).or_insert(0);
        *v += c;
        if *v == 0 {
            self.coeffs.remove(&e);
        }
    }

    pub fn coeff(&self, e: i64) -> i64 {
        self.coeffs.get(&e).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (e + k, c)))
    }

    pub fn scale(&self, s: i64) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (e, c * s)))
    }

    /// `p(x) -> p(x^-1)`.
    pub fn reflect(&self) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (-e, c)))
    }

    pub fn eval(&self, x: i64) -> Option<i64> {
        // only for |x| = 1 or nonnegative exponents
        let mut acc: i64 = 0;
        for (e, c) in self.terms() {
            let v = if x == 1 {
                1
            } else if x == -1 {
                if e.rem_euclid(2) == 0 {
                    1
                } else {
                    -1
                }
            } else if e >= 0 {
                x.checked_pow(e as u32)?
            } else {
                return None;
            };
            acc = acc.checked_add(c.checked_mul(v)?)?;
        }
        Some(acc)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn fmt_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (e, c)) in self.terms().enumerate() {
            let mono = match e {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{e}"),
            };
            let (sign, a) = if c < 0 { ("-", -c) } else { ("+", c) };
            if k == 0 {
                if sign == "-" {
                    s.push('-');
                }
            } else {
                let _ = write!(s, " {sign} ");
            }
            if a != 1 || mono.is_empty() {
                let _ = write!(s, "{a}");
            }
            s.push_str(&mono);
        }
        s
    }
}

impl fmt::Display for Laurent1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_var("q"))
    }
}

/// Laurent polynomial in `t` and `q` with integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Laurent2 {
    coeffs: BTreeMap<(i64, i64), i64>,
}

impl Laurent2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, 1)
    }

    /// `c t^i q^j`.
    pub fn monomial(i: i64, j: i64, c: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((i64, i64), i64)>) -> Self {
        let mut p = Self::zero();
        for ((i, j), c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn add_term(&mut self, i: i64, j: i64, c: i64) {
        if c == 0 {
            return;
        }
        let v = self.coeffs.entry((i, j)).or_insert(0);
        *v += c;
        if *v == 0 {
            self.coeffs.remove(&(i, j));
        }
    }

    pub fn coeff(&self, i: i64, j: i64) -> i64 {
        self.coeffs.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), i64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.values().all(|&c| c >= 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((i, j), c) in other.terms() {
            out.add_term(i, j, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((i, j), c) in other.terms() {
            out.add_term(i, j, -c);
        }
        out
    }

    /// Convolution product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((i1, j1), c1) in self.terms() {
            for ((i2, j2), c2) in other.terms() {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }

    /// Nonnegative polynomial back to a table, if all coefficients are >= 0.
    pub fn to_table(&self) -> Option<DimTable> {
        if !self.is_nonnegative() {
            return None;
        }
        Some(DimTable::from_cells(self.terms().map(|(k, c)| (k, c as u64))))
    }
}

impl fmt::Display for Laurent2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, ((i, j), c)) in self.terms().enumerate() {
            let (sign, a) = if c < 0 { ("-", -c) } else { ("+", c) };
            if k == 0 {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mut mono = String::new();
            match i {
                0 => {}
                1 => mono.push('t'),
                _ => {
                    let _ = write!(mono, "t^{i}");
                }
            }
            match j {
                0 => {}
                1 => mono.push('q'),
                _ => {
                    let _ = write!(mono, "q^{j}");
                }
            }
            if a != 1 || mono.is_empty() {
                write!(f, "{a}")?;
            }
            f.write_str(&mono)?;
        }
        Ok(())
    }
}

/// Two-variable Poincaré series `sum dim t^i q^j`.
pub fn poincare_series(tbl: &DimTable) -> Laurent2 {
    Laurent2::from_terms(tbl.iter().map(|(b, d)| ((b.i, b.j), d as i64)))
}

/// Graded Euler characteristic `sum (-1)^i dim q^j`.
pub fn graded_euler(tbl: &DimTable) -> Laurent1 {
    Laurent1::from_terms(tbl.iter().map(|(b, d)| {
        let s = if b.i.rem_euclid(2) == 0 { 1 } else { -1 };
        (b.j, s * d as i64)
    }))
}

pub fn mul(a: &Laurent2, b: &Laurent2) -> Laurent2 {
    a.mul(b)
}

// ---------------------------------------------------------------------------
// Kauffman bracket

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BracketError {
    #[error("bracket budget exceeded: {states} partial states after {done} of {total} crossings")]
    Budget { states: usize, done: usize, total: usize },
}

pub const DEFAULT_BRACKET_STATES: usize = 2_000_000;

/// Unnormalized Jones polynomial from the Kauffman bracket.
///
/// Crossings are absorbed one at a time; partial states with the same
/// boundary connectivity are merged, so the work is governed by the width
/// of the scan rather than by `2^n`.
pub fn kauffman_jones(d: &Diagram) -> Result<Laurent1, BracketError> {
    kauffman_jones_with_budget(d, DEFAULT_BRACKET_STATES)
}

pub fn kauffman_jones_with_budget(d: &Diagram, max_states: usize) -> Result<Laurent1, BracketError> {
    let bracket = kauffman_bracket(d, max_states)?;
    let w = d.writhe();
    // (-A^3)^-w
    let sign = if w.rem_euclid(2) == 0 { 1 } else { -1 };
    let corrected = bracket.shift(-3 * w).scale(sign);
    let mut out = Laurent1::zero();
    for (e, c) in corrected.terms() {
        assert!(e % 2 == 0, "odd A-exponent in a knot bracket");
        let k = e / 2;
        let s = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        out.add_term(-k, s * c);
    }
    Ok(out)
}

/// `<D>` in the variable A, with `<O> = -A^2 - A^-2`.
pub fn kauffman_bracket(d: &Diagram, max_states: usize) -> Result<Laurent1, BracketError> {
    let loop_value = Laurent1::from_terms([(2, -1), (-2, -1)]);
    let mut free = Laurent1::one();
    for _ in 0..d.free_loops() {
        free = free.mul(&loop_value);
    }
    let n = d.crossing_count();
    if n == 0 {
        return Ok(free);
    }
    let order = scan_order(d);
    let xs = d.crossings();

    // boundary: edge labels with exactly one end absorbed; state: partner index per boundary slot
    let mut boundary: Vec<u32> = vec![];
    let mut states: FxHashMap<Vec<u16>, Laurent1> = FxHashMap::default();
    states.insert(vec![], Laurent1::one());
    for (done, &c) in order.iter().enumerate() {
        let labels = xs[c].edges;
        let m = boundary.len();
        // node ids: 0..m old boundary, m..m+4 crossing slots
        let mut glue = vec![usize::MAX; m + 4];
        for s in 0..4 {
            if let Some(p) = boundary.iter().position(|&b| b == labels[s]) {
                glue[m + s] = p;
                glue[p] = m + s;
            }
        }
        for s in 0..4 {
            for t in s + 1..4 {
                if labels[s] == labels[t] {
                    glue[m + s] = m + t;
                    glue[m + t] = m + s;
                }
            }
        }
        let mut new_boundary = vec![];
        let mut new_index = vec![usize::MAX; m + 4];
        for v in 0..m + 4 {
            if glue[v] == usize::MAX {
                new_index[v] = new_boundary.len();
                new_boundary.push(if v < m { boundary[v] } else { labels[v - m] });
            }
        }
        let mut next: FxHashMap<Vec<u16>, Laurent1> = FxHashMap::default();
        for (state, poly) in &states {
            for bit in 0..2u8 {
                let mut arc = vec![usize::MAX; m + 4];
                for (v, &p) in state.iter().enumerate() {
                    arc[v] = p as usize;
                }
                for (a, b) in xs[c].smoothing(bit) {
                    arc[m + a] = m + b;
                    arc[m + b] = m + a;
                }
                let mut seen = vec![false; m + 4];
                let mut matching = vec![0u16; new_boundary.len()];
                // open paths start at unglued nodes
                for v in 0..m + 4 {
                    if glue[v] != usize::MAX || seen[v] {
                        continue;
                    }
                    let mut cur = v;
                    loop {
                        seen[cur] = true;
                        let a = arc[cur];
                        seen[a] = true;
                        if glue[a] == usize::MAX {
                            matching[new_index[v]] = new_index[a] as u16;
                            matching[new_index[a]] = new_index[v] as u16;
                            break;
                        }
                        cur = glue[a];
                    }
                }
                let mut loops = 0;
                for v in 0..m + 4 {
                    if seen[v] {
                        continue;
                    }
                    loops += 1;
                    let mut cur = v;
                    while !seen[cur] {
                        seen[cur] = true;
                        let a = arc[cur];
                        seen[a] = true;
                        cur = glue[a];
                    }
                }
                let mut term = poly.shift(if bit == 0 { 1 } else { -1 });
                for _ in 0..loops {
                    term = term.mul(&loop_value);
                }
                let slot = next.entry(matching).or_default();
                *slot = slot.add(&term);
            }
        }
        next.retain(|_, p| !p.is_zero());
        if next.len() > max_states {
            return Err(BracketError::Budget { states: next.len(), done: done + 1, total: n });
        }
        states = next;
        boundary = new_boundary;
    }
    debug_assert!(boundary.is_empty());
    Ok(states.remove(&Vec::new()).unwrap_or_default().mul(&free))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knotio::{catalog_get, from_braid};
    use proptest::prelude::*;

    fn unknot_table() -> DimTable {
        DimTable::from_cells([((0, -1), 1), ((0, 1), 1)])
    }

    fn trefoil_table() -> DimTable {
        DimTable::from_cells([((0, 1), 1), ((0, 3), 1), ((2, 5), 1), ((3, 9), 1)])
    }

    #[test]
    fn poincare_examples() {
        assert_eq!(poincare_series(&unknot_table()).to_string(), "q^-1 + q");
        assert!(poincare_series(&DimTable::new()).is_zero());
    }

    #[test]
    fn euler_examples() {
        assert_eq!(graded_euler(&unknot_table()), Laurent1::from_terms([(1, 1), (-1, 1)]));
        assert_eq!(
            graded_euler(&trefoil_table()),
            Laurent1::from_terms([(1, 1), (3, 1), (5, 1), (9, -1)])
        );
    }

    #[test]
    fn mul_examples() {
        let a = Laurent2::monomial(2, 5, 1);
        let b = Laurent2::from_terms([((0, 0), 1), ((1, 4), 1)]);
        assert_eq!(mul(&a, &b), Laurent2::from_terms([((2, 5), 1), ((3, 9), 1)]));
        assert!(mul(&a, &Laurent2::zero()).is_zero());
        let s = Laurent2::from_terms([((0, 1), 1), ((0, -1), 1)]);
        assert_eq!(mul(&s, &s), Laurent2::from_terms([((0, 2), 1), ((0, 0), 2), ((0, -2), 1)]));
    }

    #[test]
    fn jones_small() {
        let q = |t: &[(i64, i64)]| Laurent1::from_terms(t.iter().copied());
        assert_eq!(kauffman_jones(&catalog_get("unknot").unwrap()).unwrap(), q(&[(1, 1), (-1, 1)]));
        assert_eq!(kauffman_jones(&catalog_get("unknot_r1").unwrap()).unwrap(), q(&[(1, 1), (-1, 1)]));
        let right = q(&[(1, 1), (3, 1), (5, 1), (9, -1)]);
        assert_eq!(kauffman_jones(&catalog_get("trefoil_r").unwrap()).unwrap(), right);
        assert_eq!(kauffman_jones(&from_braid(&[1, 1, 1], 2).unwrap()).unwrap(), right);
        assert_eq!(kauffman_jones(&catalog_get("trefoil_l").unwrap()).unwrap(), right.reflect());
    }

    #[test]
    fn bracket_budget() {
        let d = catalog_get("10_124").unwrap();
        assert!(matches!(kauffman_jones_with_budget(&d, 1), Err(BracketError::Budget { .. })));
    }

    #[test]
    fn grid_round_trip() {
        let t = trefoil_table();
        let g = t.render_grid(&[Bigrading::new(2, 5)]);
        assert_eq!(DimTable::parse_grid(&g).unwrap(), t);
        assert_eq!(DimTable::from_json(&t.to_json()).unwrap(), t);
        assert_eq!(DimTable::from_csv(&t.to_csv()).unwrap(), t);
        assert!(t.to_csv().starts_with("i,j,dim\n"));
    }

    fn small_poly() -> impl Strategy<Value = Laurent2> {
        proptest::collection::vec(((-3i64..3, -5i64..5), -4i64..4), 0..6).prop_map(Laurent2::from_terms)
    }

    proptest! {
        #[test]
        fn mul_commutative_associative(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn poincare_inverts_extraction(cells in proptest::collection::vec(((-6i64..6, -9i64..9), 1u64..5), 0..12)) {
            let t = DimTable::from_cells(cells);
            let p = poincare_series(&t);
            prop_assert_eq!(p.to_table().unwrap(), t.clone());
            for (b, d) in t.iter() {
                prop_assert_eq!(p.coeff(b.i, b.j), d as i64);
            }
        }
    }
}
