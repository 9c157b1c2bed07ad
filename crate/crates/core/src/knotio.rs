//! Oriented planar diagrams: PD-code ingestion, braid closures, full-twist
//! insertion and the bundled catalog.
//!
//! PD convention: each crossing `X[a,b,c,d]` lists its four edge labels
//! counterclockwise, starting from the incoming under-strand. The under-strand
//! therefore runs `a -> c`; the direction of the over-strand (`b`/`d`) is
//! recovered by walking the strands. The 0-smoothing of a crossing joins
//! `a-b` and `c-d`, the 1-smoothing joins `a-d` and `b-c`.

use std::collections::BTreeSet;
use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type EdgeId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("malformed token `{0}`")]
    Malformed(String),
    #[error("empty diagram input")]
    Empty,
    #[error("edge incidence: edge {edge} occurs {count} time(s), expected 2")]
    EdgeIncidence { edge: EdgeId, count: usize },
    #[error("orientation inconsistency on the strand through crossing {0}")]
    Orientation(usize),
    #[error("diagram has {0} components, a knot is required")]
    NotAKnot(usize),
    #[error("braid generator {generator} out of range for {strands} strands")]
    BraidIndex { generator: i32, strands: usize },
    #[error("full twist: {0}")]
    Twist(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownKnot(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub edges: [EdgeId; 4],
    pub sign: Sign,
}

impl Crossing {
    /// Pairs of slots joined by the given smoothing (0 or 1).
    pub fn smoothing(&self, bit: u8) -> [(usize, usize); 2] {
        if bit == 0 {
            [(0, 1), (2, 3)]
        } else {
            [(0, 3), (1, 2)]
        }
    }
}

/// A slot on a crossing: `(crossing index, slot 0..4)`.
pub type End = (usize, usize);

/// An oriented planar diagram with validated incidence and orientation.
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct Diagram {
    crossings: Vec<Crossing>,
    free_loops: usize,
    strand_components: usize,
    n_plus: usize,
    n_minus: usize,
    // edge -> (tail, head)
    ends: FxHashMap<EdgeId, (End, End)>,
}

impl PartialEq for Diagram {
    fn eq(&self, other: &Self) -> bool {
        self.crossings == other.crossings && self.free_loops == other.free_loops
    }
}

impl Diagram {
    /// The crossingless unknot.
    pub fn unknot() -> Diagram {
        Diagram {
            crossings: Vec::new(),
            free_loops: 1,
            strand_components: 0,
            n_plus: 0,
            n_minus: 0,
            ends: FxHashMap::default(),
        }
    }

    /// Validate raw PD tuples; signs are derived from the inferred orientation.
    pub fn from_pd(tuples: &[[EdgeId; 4]], free_loops: usize) -> Result<Diagram, DiagramError> {
        if tuples.is_empty() && free_loops == 0 {
            return Err(DiagramError::Empty);
        }
        let mut slots: FxHashMap<EdgeId, Vec<End>> = FxHashMap::default();
        for (c, t) in tuples.iter().enumerate() {
            for (s, &e) in t.iter().enumerate() {
                slots.entry(e).or_default().push((c, s));
            }
        }
        let mut labels: Vec<_> = slots.keys().copied().collect();
        labels.sort_unstable();
        for &e in &labels {
            let n = slots[&e].len();
            if n != 2 {
                return Err(DiagramError::EdgeIncidence { edge: e, count: n });
            }
        }
        let other = |end: End| -> End {
            let v = &slots[&tuples[end.0][end.1]];
            if v[0] == end {
                v[1]
            } else {
                v[0]
            }
        };

        // Walk every strand once; `exit` darts are (crossing, slot) we leave through.
        let mut visited: FxHashMap<End, bool> = FxHashMap::default();
        let mut ends: FxHashMap<EdgeId, (End, End)> = FxHashMap::default();
        let mut over_in: Vec<Option<usize>> = vec![None; tuples.len()];
        let mut components = 0;
        for &start_edge in &labels {
            let first = slots[&start_edge][0];
            if visited.contains_key(&first) {
                continue;
            }
            components += 1;
            // trace the cycle of exit darts starting by leaving through `first`
            let trace = |start: End| -> Vec<End> {
                let mut darts = vec![];
                let mut cur = start;
                loop {
                    darts.push(cur);
                    let (c, s) = other(cur);
                    let next = (c, (s + 2) % 4);
                    if next == start {
                        break;
                    }
                    cur = next;
                }
                darts
            };
            let darts = trace(first);
            let (mut fwd, mut bwd) = (0, 0);
            for &d in &darts {
                match other(d).1 {
                    0 => fwd += 1,
                    2 => bwd += 1,
                    _ => {}
                }
            }
            let darts = if fwd > 0 && bwd > 0 {
                let bad = darts.iter().map(|d| other(*d)).find(|e| e.1 == 2).unwrap();
                return Err(DiagramError::Orientation(bad.0));
            } else if bwd > 0 {
                trace(other(first))
            } else if fwd > 0 {
                darts
            } else {
                // Pure over-strand: leave the lowest edge towards its smaller neighbour.
                let a = darts;
                let b = trace(other(first));
                let next_label = |ds: &Vec<End>| {
                    let (c, s) = ds[1 % ds.len()];
                    tuples[c][s]
                };
                if next_label(&b) < next_label(&a) {
                    b
                } else {
                    a
                }
            };
            for &d in &darts {
                visited.insert(d, true);
                visited.insert(other(d), true);
                let head = other(d);
                ends.insert(tuples[d.0][d.1], (d, head));
                if head.1 == 1 || head.1 == 3 {
                    over_in[head.0] = Some(head.1);
                }
            }
        }

        let mut crossings = Vec::with_capacity(tuples.len());
        let (mut n_plus, mut n_minus) = (0, 0);
        for (c, t) in tuples.iter().enumerate() {
            let sign = match over_in[c] {
                Some(3) => Sign::Positive,
                Some(1) => Sign::Negative,
                _ => return Err(DiagramError::Orientation(c)),
            };
            match sign {
                Sign::Positive => n_plus += 1,
                Sign::Negative => n_minus += 1,
            }
            crossings.push(Crossing { edges: *t, sign });
        }
        Ok(Diagram { crossings, free_loops, strand_components: components, n_plus, n_minus, ends })
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn n_minus(&self) -> usize {
        self.n_minus
    }

    pub fn writhe(&self) -> i64 {
        self.n_plus as i64 - self.n_minus as i64
    }

    /// Closed components, including crossingless loops.
    pub fn components(&self) -> usize {
        self.strand_components + self.free_loops
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    pub fn is_knot(&self) -> bool {
        self.components() == 1
    }

    pub fn require_knot(&self) -> Result<(), DiagramError> {
        if self.is_knot() {
            Ok(())
        } else {
            Err(DiagramError::NotAKnot(self.components()))
        }
    }

    /// Sorted edge labels.
    pub fn edges(&self) -> Vec<EdgeId> {
        let mut v: Vec<_> = self.ends.keys().copied().collect();
        v.sort_unstable();
        v
    }

    /// `(tail, head)` slots of an edge.
    pub fn edge_ends(&self, e: EdgeId) -> Option<(End, End)> {
        self.ends.get(&e).copied()
    }

    /// The slot at the other end of the edge leaving `end`.
    pub fn partner(&self, end: End) -> End {
        let e = self.crossings[end.0].edges[end.1];
        let (t, h) = self.ends[&e];
        if t == end {
            h
        } else {
            t
        }
    }

    /// Edges of the knot in traversal order, starting from the lowest label.
    pub fn traversal(&self) -> Vec<EdgeId> {
        let edges = self.edges();
        let Some(&start) = edges.first() else { return vec![] };
        let mut out = vec![start];
        let mut e = start;
        loop {
            let (_, (c, s)) = self.ends[&e];
            e = self.crossings[c].edges[(s + 2) % 4];
            if e == start {
                break;
            }
            out.push(e);
        }
        out
    }

    /// Mirror image: every crossing switched, planar picture unchanged.
    pub fn mirror(&self) -> Diagram {
        let tuples: Vec<[EdgeId; 4]> = self
            .crossings
            .iter()
            .map(|x| {
                let [a, b, c, d] = x.edges;
                match x.sign {
                    Sign::Positive => [d, a, b, c],
                    Sign::Negative => [b, c, d, a],
                }
            })
            .collect();
        Diagram::from_pd(&tuples, self.free_loops).expect("mirror of a valid diagram")
    }

    /// Faces of the planar map as cycles of exit slots (face on the left).
    pub fn faces(&self) -> Vec<Vec<End>> {
        let mut seen: FxHashMap<End, ()> = FxHashMap::default();
        let mut faces = vec![];
        for c in 0..self.crossings.len() {
            for s in 0..4 {
                if seen.contains_key(&(c, s)) {
                    continue;
                }
                let mut face = vec![];
                let mut cur = (c, s);
                while seen.insert(cur, ()).is_none() {
                    face.push(cur);
                    let (c2, s2) = self.partner(cur);
                    cur = (c2, (s2 + 3) % 4);
                }
                faces.push(face);
            }
        }
        faces
    }

    fn connected_pieces(&self) -> usize {
        let n = self.crossings.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for &(t, h) in self.ends.values() {
            let (a, b) = (find(&mut parent, t.0), find(&mut parent, h.0));
            parent[a] = b;
        }
        (0..n).filter(|&x| find(&mut parent, x) == x).count()
    }

    /// Euler-characteristic check of the rotation system.
    pub fn is_planar(&self) -> bool {
        let n = self.crossings.len() as i64;
        if n == 0 {
            return true;
        }
        let f = self.faces().len() as i64;
        n - 2 * n + f == 1 + self.connected_pieces() as i64
    }

    /// A diagram is alternating when every strand alternates over and under.
    pub fn is_alternating(&self) -> bool {
        self.ends.values().all(|&(t, h)| (t.1 % 2) != (h.1 % 2))
    }

    /// Relabel edges `1..=2n` along the orientation, component by component.
    pub fn normalized(&self) -> Diagram {
        let mut relabel: FxHashMap<EdgeId, EdgeId> = FxHashMap::default();
        let mut next = 1;
        for e in self.edges() {
            if relabel.contains_key(&e) {
                continue;
            }
            let mut cur = e;
            loop {
                relabel.insert(cur, next);
                next += 1;
                let (_, (c, s)) = self.ends[&cur];
                cur = self.crossings[c].edges[(s + 2) % 4];
                if cur == e {
                    break;
                }
            }
        }
        let tuples: Vec<[EdgeId; 4]> =
            self.crossings.iter().map(|x| x.edges.map(|e| relabel[&e])).collect();
        Diagram::from_pd(&tuples, self.free_loops).expect("relabelling preserves validity")
    }

    pub fn pd_tuples(&self) -> Vec<[EdgeId; 4]> {
        self.crossings.iter().map(|x| x.edges).collect()
    }

    /// PD text: one `X[..]` per crossing, `UNKNOT` per crossingless loop.
    pub fn to_pd_string(&self) -> String {
        let mut parts: Vec<String> = self
            .crossings
            .iter()
            .map(|x| format!("X[{},{},{},{}]", x.edges[0], x.edges[1], x.edges[2], x.edges[3]))
            .collect();
        for _ in 0..self.free_loops {
            parts.push("UNKNOT".into());
        }
        parts.join(" ")
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pd_string())
    }
}

/// Parse PD text: whitespace (or comma) separated `X[a,b,c,d]` tuples, the
/// keyword `UNKNOT`, and `#` comment lines.
pub fn parse_pd(text: &str) -> Result<Diagram, DiagramError> {
    let mut tuples = vec![];
    let mut loops = 0;
    for line in text.lines() {
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let mut rest = line.trim();
        if let Some(inner) = rest.strip_prefix("PD[").and_then(|r| r.strip_suffix(']')) {
            rest = inner;
        }
        while !rest.is_empty() {
            rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == ',');
            if rest.is_empty() {
                break;
            }
            if let Some(r) = rest.strip_prefix("UNKNOT") {
                loops += 1;
                rest = r;
                continue;
            }
            let Some(r) = rest.strip_prefix("X[") else {
                let tok: String = rest.chars().take_while(|c| !c.is_whitespace()).collect();
                return Err(DiagramError::Malformed(tok));
            };
            let Some(close) = r.find(']') else {
                return Err(DiagramError::Malformed(rest.to_string()));
            };
            let body = &r[..close];
            let nums: Result<Vec<EdgeId>, _> = body.split(',').map(|s| s.trim().parse::<EdgeId>()).collect();
            match nums {
                Ok(v) if v.len() == 4 => tuples.push([v[0], v[1], v[2], v[3]]),
                _ => return Err(DiagramError::Malformed(format!("X[{body}]"))),
            }
            rest = &r[close + 1..];
        }
    }
    if tuples.is_empty() && loops == 0 {
        return Err(DiagramError::Empty);
    }
    Diagram::from_pd(&tuples, loops)
}

/// Closure of a braid. Generators are 1-based signed indices: `k` is the
/// positive crossing between strands `k` and `k+1`, `-k` its inverse.
pub fn from_braid(word: &[i32], strands: usize) -> Result<Diagram, DiagramError> {
    if strands == 0 {
        return Err(DiagramError::BraidIndex { generator: 0, strands });
    }
    for &g in word {
        if g == 0 || g.unsigned_abs() as usize >= strands {
            return Err(DiagramError::BraidIndex { generator: g, strands });
        }
    }
    let mut next: EdgeId = 1;
    let mut fresh = || {
        let l = next;
        next += 1;
        l
    };
    let initial: Vec<EdgeId> = (0..strands).map(|_| fresh()).collect();
    let mut cur = initial.clone();
    let mut tuples = vec![];
    let mut touched = vec![false; strands];
    for &g in word {
        let j = g.unsigned_abs() as usize - 1;
        touched[j] = true;
        touched[j + 1] = true;
        let (sw, se) = (cur[j], cur[j + 1]);
        let (nw, ne) = (fresh(), fresh());
        // all strands run upward
        tuples.push(if g > 0 { [se, ne, nw, sw] } else { [sw, se, ne, nw] });
        cur[j] = nw;
        cur[j + 1] = ne;
    }
    // close up: the final label at each position is identified with the initial one
    let mut subst: FxHashMap<EdgeId, EdgeId> = FxHashMap::default();
    for p in 0..strands {
        if cur[p] != initial[p] {
            subst.insert(cur[p], initial[p]);
        }
    }
    // positions permute, so chase identifications to a fixed point
    let resolve = |mut e: EdgeId| {
        while let Some(&f) = subst.get(&e) {
            e = f;
        }
        e
    };
    let tuples: Vec<[EdgeId; 4]> = tuples.iter().map(|t| t.map(resolve)).collect();
    let free = touched.iter().filter(|t| !**t).count();
    if tuples.is_empty() {
        return Ok(Diagram {
            free_loops: free,
            ..Diagram::unknot()
        });
    }
    Ok(Diagram::from_pd(&tuples, free)?.normalized())
}

/// A full twist of `strands` parallel strands crossing a disk. The disk meets
/// the attachment edges in the listed order; the planar embedding determines
/// which side of the disk each edge end lies on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistSpec {
    pub strands: usize,
    pub sign: Sign,
    pub attachment: Vec<EdgeId>,
}

/// Insert a full twist along the attachment edges, adding `k(k-1)` crossings.
pub fn insert_full_twist(d: &Diagram, spec: &TwistSpec) -> Result<Diagram, DiagramError> {
    let k = spec.strands;
    if k == 0 {
        return Err(DiagramError::Twist("zero strands".into()));
    }
    if spec.attachment.len() != k {
        return Err(DiagramError::Twist(format!(
            "{} attachment edges for {k} strands",
            spec.attachment.len()
        )));
    }
    let distinct: BTreeSet<_> = spec.attachment.iter().collect();
    if distinct.len() != k {
        return Err(DiagramError::Twist("attachment edges must be distinct".into()));
    }
    if d.crossing_count() == 0 {
        return twist_crossingless(d, spec);
    }
    for e in &spec.attachment {
        if d.edge_ends(*e).is_none() {
            return Err(DiagramError::Twist(format!("attachment edge {e} missing")));
        }
    }
    if k == 1 {
        return Ok(d.clone());
    }

    // faces on the left/right of each attachment edge
    let mut face_of: FxHashMap<End, usize> = FxHashMap::default();
    for (i, f) in d.faces().iter().enumerate() {
        for &dart in f {
            face_of.insert(dart, i);
        }
    }
    let sides = |e: EdgeId| {
        let (t, h) = d.edge_ends(e).unwrap();
        (face_of[&t], face_of[&h])
    };
    let mut between = Vec::with_capacity(k - 1);
    for w in spec.attachment.windows(2) {
        let (l0, r0) = sides(w[0]);
        let (l1, r1) = sides(w[1]);
        let common: BTreeSet<usize> =
            [l0, r0].into_iter().filter(|f| *f == l1 || *f == r1).collect();
        match common.first() {
            Some(&f) => between.push(f),
            None => {
                return Err(DiagramError::Twist(format!(
                    "edges {} and {} do not share a face",
                    w[0], w[1]
                )))
            }
        }
    }
    // upward[i]: the edge crosses the disk from bottom to top along its orientation
    let mut upward = Vec::with_capacity(k);
    for (i, &e) in spec.attachment.iter().enumerate() {
        let (left, right) = sides(e);
        let entering = if i > 0 {
            between[i - 1]
        } else if between[0] == left {
            right
        } else {
            left
        };
        // crossing from the left face to the right face puts the head on top
        upward.push(entering == left && !(i == 0 && left == right));
    }

    let mut next: EdgeId = d.edges().last().copied().unwrap_or(0) + 1;
    let mut fresh = || {
        let l = next;
        next += 1;
        l
    };
    let mut tuples = d.pd_tuples();
    let mut pos: Vec<(EdgeId, bool)> = Vec::with_capacity(k);
    let mut top_ends = Vec::with_capacity(k);
    for (i, &e) in spec.attachment.iter().enumerate() {
        let (tail, head) = d.edge_ends(e).unwrap();
        let (bottom, top) = if upward[i] { (tail, head) } else { (head, tail) };
        let b = fresh();
        tuples[bottom.0][bottom.1] = b;
        pos.push((b, upward[i]));
        top_ends.push(top);
    }
    let positive = spec.sign == Sign::Positive;
    for _ in 0..k {
        for j in 0..k - 1 {
            let ((sw, up_l), (se, up_r)) = (pos[j], pos[j + 1]);
            let (nw, ne) = (fresh(), fresh());
            let t = if positive {
                // over SW-NE, under SE-NW
                if up_r {
                    [se, ne, nw, sw]
                } else {
                    [nw, sw, se, ne]
                }
            } else if up_l {
                [sw, se, ne, nw]
            } else {
                [ne, nw, sw, se]
            };
            tuples.push(t);
            pos[j] = (nw, up_r);
            pos[j + 1] = (ne, up_l);
        }
    }
    for (p, top) in top_ends.into_iter().enumerate() {
        tuples[top.0][top.1] = pos[p].0;
    }
    let out = Diagram::from_pd(&tuples, d.free_loops)?;
    if !out.is_planar() {
        return Err(DiagramError::Twist("attachment is not realised by a disk".into()));
    }
    Ok(out.normalized())
}

/// A crossingless circle meets the disk in two antiparallel strands.
fn twist_crossingless(d: &Diagram, spec: &TwistSpec) -> Result<Diagram, DiagramError> {
    if spec.strands == 1 {
        return Ok(d.clone());
    }
    if spec.strands != 2 || d.free_loops != 1 {
        return Err(DiagramError::Twist("a crossingless circle only admits a 2-strand twist".into()));
    }
    // left strand up, right strand down; edge 1 is the lower cup, 4 the upper cap
    let t = if spec.sign == Sign::Positive {
        vec![[2, 1, 1, 3], [3, 4, 4, 2]]
    } else {
        vec![[1, 1, 3, 2], [4, 4, 2, 3]]
    };
    Ok(Diagram::from_pd(&t, 0)?.normalized())
}

/// Greedy crossing order minimizing the open boundary after each step; ties
/// go to the lowest crossing index.
pub fn scan_order(d: &Diagram) -> Vec<usize> {
    scan_order_from(d, 0)
}

/// [`scan_order`] starting from a chosen crossing.
pub fn scan_order_from(d: &Diagram, start: usize) -> Vec<usize> {
    let n = d.crossing_count();
    let mut order = Vec::with_capacity(n);
    if n == 0 {
        return order;
    }
    let mut taken = vec![false; n];
    let mut open: FxHashMap<EdgeId, ()> = FxHashMap::default();
    let take = |c: usize, taken: &mut Vec<bool>, open: &mut FxHashMap<EdgeId, ()>, order: &mut Vec<usize>| {
        taken[c] = true;
        order.push(c);
        for e in d.crossings[c].edges {
            if open.remove(&e).is_none() {
                open.insert(e, ());
            }
        }
    };
    take(start, &mut taken, &mut open, &mut order);
    while order.len() < n {
        let mut best: Option<(i64, usize)> = None;
        for c in 0..n {
            if taken[c] {
                continue;
            }
            let mut delta = 0i64;
            let edges = d.crossings[c].edges;
            for (s, e) in edges.iter().enumerate() {
                let twice = edges.iter().filter(|x| *x == e).count() == 2;
                if twice {
                    if edges[..s].contains(e) {
                        continue;
                    }
                    // internal loop edge
                } else if open.contains_key(e) {
                    delta -= 1;
                } else {
                    delta += 1;
                }
            }
            if best.map_or(true, |(b, _)| delta < b) {
                best = Some((delta, c));
            }
        }
        let (_, c) = best.unwrap();
        take(c, &mut taken, &mut open, &mut order);
    }
    order
}

// ---------------------------------------------------------------------------
// catalog

pub struct CatalogEntry {
    pub name: &'static str,
    pub alternating: bool,
    pub text: &'static str,
}

macro_rules! entry {
    ($name:literal, $alt:literal) => {
        CatalogEntry {
            name: $name,
            alternating: $alt,
            text: include_str!(concat!("../data/catalog/", $name, ".pd")),
        }
    };
}

pub static CATALOG: &[CatalogEntry] = &[
    entry!("unknot", true),
    entry!("unknot_r1", true),
    entry!("unknot_r2", true),
    entry!("trefoil_r", true),
    entry!("trefoil_l", true),
    entry!("trefoil_r_braid", true),
    entry!("figure8", true),
    entry!("figure8_braid", true),
    entry!("5_1", true),
    entry!("5_2", true),
    entry!("6_1", true),
    entry!("6_2", true),
    entry!("6_3", true),
    entry!("7_1", true),
    entry!("8_19", false),
    entry!("8_20", false),
    entry!("8_21", false),
    entry!("10_124", false),
    entry!("K_paper", false),
];

const ALIASES: &[(&str, &str)] = &[("trefoil", "trefoil_r"), ("figure-eight", "figure8"), ("K", "K_paper")];

pub fn catalog_names() -> Vec<&'static str> {
    CATALOG.iter().map(|e| e.name).collect()
}

pub fn catalog_entry(name: &str) -> Result<&'static CatalogEntry, DiagramError> {
    let name = ALIASES.iter().find(|(a, _)| *a == name).map(|(_, n)| *n).unwrap_or(name);
    CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| DiagramError::UnknownKnot(name.to_string()))
}

pub fn catalog_get(name: &str) -> Result<Diagram, DiagramError> {
    parse_pd(catalog_entry(name)?.text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TREFOIL_R: &str = "X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]";

    #[test]
    fn unknot_keyword() {
        let d = parse_pd("# the unknot\nUNKNOT\n").unwrap();
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.components(), 1);
    }

    #[test]
    fn trefoil_signs() {
        // Orientation by hand: under strands 1->2, 3->4, 5->6; the over strand
        // at X[1,5,2,4] runs 4->5, i.e. enters at slot 3: positive.
        let d = parse_pd(TREFOIL_R).unwrap();
        assert_eq!(d.crossing_count(), 3);
        assert!(d.crossings().iter().all(|x| x.sign == Sign::Positive));
        assert_eq!(d.writhe(), 3);
        assert!(d.is_knot());
        assert!(d.is_alternating());
        assert!(d.is_planar());
        assert_eq!(d.mirror().writhe(), -3);
    }

    #[test]
    fn edge_incidence_error() {
        let e = parse_pd("X[1,5,2,4] X[3,1,4,6] X[5,3,6,7]").unwrap_err();
        assert!(e.to_string().contains("edge incidence"));
    }

    #[test]
    fn malformed() {
        assert!(matches!(parse_pd("X[1,2,3]"), Err(DiagramError::Malformed(_))));
        assert!(matches!(parse_pd("Y[1,2,3,4]"), Err(DiagramError::Malformed(_))));
        assert_eq!(parse_pd("# nothing\n"), Err(DiagramError::Empty));
    }

    #[test]
    fn orientation_conflict() {
        // edge 1 enters both crossings as the incoming under-strand
        let e = parse_pd("X[1,2,3,4] X[1,4,3,2]").unwrap_err();
        assert!(matches!(e, DiagramError::Orientation(_)));
    }

    #[test]
    fn braid_closures() {
        let t = from_braid(&[1, 1, 1], 2).unwrap();
        assert_eq!(t.crossing_count(), 3);
        assert_eq!(t.writhe(), 3);
        assert!(t.is_knot());
        let u = from_braid(&[], 1).unwrap();
        assert_eq!(u.crossing_count(), 0);
        assert!(u.is_knot());
        let u2 = from_braid(&[1, -2], 3).unwrap();
        assert_eq!(u2.crossing_count(), 2);
        assert_eq!(u2.writhe(), 0);
        assert!(u2.is_knot());
        assert_eq!(from_braid(&[1, -1], 2).unwrap().components(), 2);
        assert_eq!(from_braid(&[1], 2).unwrap().components(), 1);
        assert_eq!(from_braid(&[1, 1], 2).unwrap().components(), 2);
        assert!(matches!(from_braid(&[3], 3), Err(DiagramError::BraidIndex { .. })));
    }

    #[test]
    fn twist_on_one_strand_is_identity() {
        let d = parse_pd(TREFOIL_R).unwrap();
        let spec = TwistSpec { strands: 1, sign: Sign::Positive, attachment: vec![2] };
        assert_eq!(insert_full_twist(&d, &spec).unwrap(), d);
    }

    #[test]
    fn twist_crossingless_circle() {
        let spec = TwistSpec { strands: 2, sign: Sign::Positive, attachment: vec![1, 2] };
        let d = insert_full_twist(&Diagram::unknot(), &spec).unwrap();
        assert_eq!(d.crossing_count(), 2);
        assert_eq!(d.crossings()[0].sign, d.crossings()[1].sign);
        assert!(d.is_knot());
    }

    #[test]
    fn twist_on_braid_closure_gives_torus_knot() {
        use crate::khcomplex::khovanov_homology;
        // sigma1 sigma2 closes to the unknot; with a full twist it is T(3,4)
        let u = from_braid(&[1, 2], 3).unwrap();
        let want = khovanov_homology(&from_braid(&[1, 2, 1, 2, 1, 2, 1, 2], 3).unwrap()).unwrap();
        let edges = u.edges();
        let mut hits = 0;
        for &a in &edges {
            for &b in &edges {
                for &c in &edges {
                    let spec = TwistSpec { strands: 3, sign: Sign::Positive, attachment: vec![a, b, c] };
                    let Ok(k) = insert_full_twist(&u, &spec) else { continue };
                    assert_eq!(k.crossing_count(), 8);
                    if k.is_planar() && khovanov_homology(&k).unwrap() == want {
                        hits += 1;
                    }
                }
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn twist_errors() {
        let d = parse_pd(TREFOIL_R).unwrap();
        let missing = TwistSpec { strands: 2, sign: Sign::Positive, attachment: vec![1, 99] };
        assert!(matches!(insert_full_twist(&d, &missing), Err(DiagramError::Twist(_))));
        let zero = TwistSpec { strands: 0, sign: Sign::Positive, attachment: vec![] };
        assert!(insert_full_twist(&d, &zero).is_err());
    }

    #[test]
    fn catalog_entries_validate() {
        for e in CATALOG {
            let d = catalog_get(e.name).unwrap();
            assert!(d.is_knot(), "{}", e.name);
            assert!(d.is_planar(), "{}", e.name);
            assert_eq!(d.n_plus() + d.n_minus(), d.crossing_count());
        }
        assert_eq!(catalog_get("unknot").unwrap().crossing_count(), 0);
        assert_eq!(catalog_get("trefoil_r").unwrap().writhe(), 3);
        let k = catalog_entry("K_paper").unwrap();
        let n = catalog_get("K_paper").unwrap().crossing_count();
        assert!(n == 38 || (n == 0 && k.text.starts_with("# placeholder")), "K_paper has {n} crossings");
        assert!(matches!(catalog_get("nope"), Err(DiagramError::UnknownKnot(_))));
    }

    #[test]
    fn traversal_visits_each_edge_once() {
        for e in CATALOG {
            let d = catalog_get(e.name).unwrap();
            let mut t = d.traversal();
            assert_eq!(t.len(), 2 * d.crossing_count());
            t.sort_unstable();
            t.dedup();
            assert_eq!(t.len(), 2 * d.crossing_count());
        }
    }
}
