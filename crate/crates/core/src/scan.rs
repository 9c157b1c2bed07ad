//! Crossing-by-crossing computation of Khovanov homology in the dotted
//! cobordism category (`X^2 = 0`), simplifying after every crossing.
//!
//! An object is a crossingless matching of the current boundary points, a
//! number of closed loops, a quantum shift and a homological degree. A
//! morphism between two objects is a linear combination of dot patterns on
//! the disks bounded by the cycles of `source ∪ target`; every cobordism
//! reduces to that form by neck cutting. Cycles are ordered as: cycles through
//! boundary points (by smallest boundary position), then source loops, then
//! target loops. Bit `k` of a mask puts a dot on the disk of cycle `k`.
//!
//! Gluing pieces (disks) along intervals and reading off each connected
//! component's genus, boundary cycles and dots is all the evaluation needed,
//! both for tensoring with a crossing and for composing in an elimination.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grading::DimTable;
use crate::knotio::{scan_order, Crossing, Diagram, EdgeId};
use crate::scalar::Field;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("scan budget exhausted at step {step}/{total} ({objects} objects, {entries} entries): {reason}")]
    Budget { step: usize, total: usize, objects: usize, entries: usize, reason: String },
    #[error("scan invariant violated: {0}")]
    Invariant(String),
    #[error("diagram has {0} components, a knot is required")]
    NotAKnot(usize),
    #[error("entry {0} -> {1} is not an isomorphism")]
    NotInvertible(u32, u32),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

#[derive(Clone, Debug, Default)]
pub struct ScanBudget {
    pub max_objects: Option<usize>,
    pub max_seconds: Option<f64>,
    pub max_memory_mb: Option<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct ScanOptions {
    pub budget: ScanBudget,
    /// Crossing order; defaults to the greedy boundary-minimizing order.
    pub order: Option<Vec<usize>>,
    /// Saved after every step when set; resumed from when it exists.
    pub checkpoint: Option<PathBuf>,
    /// Check `d^2 = 0` and the grading after every step (slow).
    pub verify: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanStats {
    pub steps: usize,
    pub peak_objects: usize,
    pub peak_entries: usize,
    pub peak_boundary: usize,
    pub eliminations: u64,
}

type Mor<F> = Vec<(u64, F)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Obj {
    m: u32,
    loops: u8,
    q: i32,
    h: i32,
}

/// Where a glued arc or loop came from: an arc of the old object (named by
/// one of its boundary positions) or a smoothing arc at a crossing slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Con {
    Old(usize),
    Slot(usize),
}

struct Glued {
    m: u32,
    loops: u8,
    arc_con: Vec<Con>,
    loop_con: Vec<Con>,
}

struct Comp {
    pieces: u64,
    cycles: u64,
    genus: u32,
    b: u32,
}

/// Connected components of a surface made from disks glued along intervals.
struct Topology {
    comps: Vec<Comp>,
    memo: FxHashMap<u64, Vec<(u64, i64)>>,
}

impl Topology {
    /// `reps[k]` is a piece whose boundary runs along result cycle `k`.
    fn build(n_pieces: usize, glues: &[(usize, usize)], reps: &[usize]) -> Topology {
        assert!(n_pieces <= 64 && reps.len() <= 64, "too many cycles for a mask");
        let mut parent: Vec<usize> = (0..n_pieces).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in glues {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let mut index: FxHashMap<usize, usize> = FxHashMap::default();
        let mut comps: Vec<(u64, u64, i64, i64)> = Vec::new();
        for p in 0..n_pieces {
            let r = find(&mut parent, p);
            let k = *index.entry(r).or_insert_with(|| {
                comps.push((0, 0, 0, 0));
                comps.len() - 1
            });
            comps[k].0 |= 1 << p;
            comps[k].2 += 1;
        }
        for &(a, _) in glues {
            let k = index[&find(&mut parent, a)];
            comps[k].2 -= 1;
        }
        for (c, &p) in reps.iter().enumerate() {
            let k = index[&find(&mut parent, p)];
            comps[k].1 |= 1 << c;
            comps[k].3 += 1;
        }
        let comps = comps
            .into_iter()
            .map(|(pieces, cycles, chi, b)| {
                let twice_g = 2 - b - chi;
                assert!(twice_g >= 0 && twice_g % 2 == 0, "non-orientable or malformed gluing");
                Comp { pieces, cycles, genus: (twice_g / 2) as u32, b: b as u32 }
            })
            .collect();
        Topology { comps, memo: FxHashMap::default() }
    }

    /// Reduce the glued surface with dots `dots` to disks on the result cycles.
    fn eval(&mut self, dots: u64) -> &[(u64, i64)] {
        if !self.memo.contains_key(&dots) {
            let v = self.compute(dots);
            self.memo.insert(dots, v);
        }
        &self.memo[&dots]
    }

    fn compute(&self, dots: u64) -> Vec<(u64, i64)> {
        let mut terms: Vec<(u64, i64)> = vec![(0, 1)];
        for c in &self.comps {
            let m = c.genus + (dots & c.pieces).count_ones();
            if c.b == 0 {
                // closed: handles are 2 * dot, a sphere needs exactly one dot
                if m != 1 {
                    return vec![];
                }
                terms.iter_mut().for_each(|t| t.1 <<= c.genus);
            } else if m >= 2 {
                return vec![];
            } else if m == 1 {
                terms.iter_mut().for_each(|t| {
                    t.0 |= c.cycles;
                    t.1 <<= c.genus;
                });
            } else {
                // neck cutting: one disk undotted, the others dotted
                let mut next = Vec::with_capacity(terms.len() * c.b as usize);
                for &(mask, coeff) in &terms {
                    let mut rest = c.cycles;
                    while rest != 0 {
                        let bit = rest & rest.wrapping_neg();
                        next.push((mask | (c.cycles & !bit), coeff));
                        rest &= rest - 1;
                    }
                }
                terms = next;
            }
        }
        terms
    }
}

/// Cycles of the union of two matchings on the same boundary, numbered by
/// smallest position. Returns the cycle of each position and the count.
fn cycles_of(a: &[u8], b: &[u8]) -> (Vec<u8>, usize) {
    let mut id = vec![u8::MAX; a.len()];
    let mut n = 0u8;
    for p in 0..a.len() {
        if id[p] != u8::MAX {
            continue;
        }
        let mut x = p;
        loop {
            id[x] = n;
            let y = a[x] as usize;
            id[y] = n;
            x = b[y] as usize;
            if x == p {
                break;
            }
        }
        n += 1;
    }
    (id, n as usize)
}

fn remove_bit(m: u64, pos: usize) -> u64 {
    let low = m & ((1u64 << pos) - 1);
    low | ((m >> (pos + 1)) << pos)
}

fn add_terms<F: Field>(dst: &mut Mor<F>, src: impl IntoIterator<Item = (u64, F)>) {
    dst.extend(src);
    dst.sort_by_key(|t| t.0);
    let mut out: Mor<F> = Vec::with_capacity(dst.len());
    for (m, c) in dst.drain(..) {
        match out.last_mut() {
            Some(last) if last.0 == m => last.1 += c,
            _ => out.push((m, c)),
        }
    }
    out.retain(|t| !t.1.is_zero());
    *dst = out;
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Id(u8),
    Saddle,
}

struct TensorCtx<'a> {
    nb: usize,
    old_glue: &'a [Option<usize>],
    kinks: &'a [(usize, usize)],
    crossing: &'a Crossing,
}

impl TensorCtx<'_> {
    /// Surface of `f ⊔ (crossing cobordism)` glued at the shared points, for
    /// `f` between old objects with matchings `m1`, `m2`.
    fn topology(
        &self,
        old: &[Vec<u8>],
        new: &[Vec<u8>],
        glued: &FxHashMap<(u32, u8), Glued>,
        (m1, m2, kind): (u32, u32, Kind),
    ) -> Topology {
        let (cid, nf) = cycles_of(&old[m1 as usize], &old[m2 as usize]);
        let (s1, s2) = match kind {
            Kind::Id(s) => (s, s),
            Kind::Saddle => (0, 1),
        };
        let cdisk = |slot: usize, s: u8| -> usize {
            match kind {
                Kind::Saddle => 0,
                Kind::Id(_) => self.crossing.smoothing(s).iter().position(|(a, b)| *a == slot || *b == slot).unwrap(),
            }
        };
        let n_cross = if kind == Kind::Saddle { 1 } else { 2 };
        let mut glues = Vec::new();
        for p in 0..self.nb {
            if let Some(u) = self.old_glue[p] {
                glues.push((cid[p] as usize, nf + cdisk(u - self.nb, s1)));
            }
        }
        for &(s, t) in self.kinks {
            glues.push((nf + cdisk(s, s1), nf + cdisk(t, s1)));
        }
        let piece = |c: Con, s: u8| match c {
            Con::Old(p) => cid[p] as usize,
            Con::Slot(t) => nf + cdisk(t, s),
        };
        let (g1, g2) = (&glued[&(m1, s1)], &glued[&(m2, s2)]);
        let (oid, nc) = cycles_of(&new[g1.m as usize], &new[g2.m as usize]);
        let mut reps = vec![0usize; nc];
        for p in (0..oid.len()).rev() {
            reps[oid[p] as usize] = piece(g1.arc_con[p], s1);
        }
        reps.extend(g1.loop_con.iter().map(|c| piece(*c, s1)));
        reps.extend(g2.loop_con.iter().map(|c| piece(*c, s2)));
        Topology::build(nf + n_cross, &glues, &reps)
    }
}

/// The complex of the tangle scanned so far.
pub struct PartialComplex<F> {
    diagram: Diagram,
    order: Vec<usize>,
    step: usize,
    boundary: Vec<EdgeId>,
    matchings: Vec<Vec<u8>>,
    interner: FxHashMap<Vec<u8>, u32>,
    objs: Vec<Option<Obj>>,
    out: Vec<FxHashMap<u32, Mor<F>>>,
    inc: Vec<FxHashSet<u32>>,
    live: usize,
    entries: usize,
    stats: ScanStats,
    compose_cache: FxHashMap<(u32, u32, u32), (usize, Topology)>,
    cycle_count: FxHashMap<(u32, u32), usize>,
}

impl<F: Field> PartialComplex<F> {
    /// Empty tangle: one object, the free loops of the diagram delooped.
    pub fn new(d: &Diagram, order: Vec<usize>) -> Result<Self, ScanError> {
        if !d.is_knot() {
            return Err(ScanError::NotAKnot(d.components()));
        }
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != (0..d.crossing_count()).collect::<Vec<_>>() {
            return Err(ScanError::Invariant("scan order is not a permutation of the crossings".into()));
        }
        let mut pc = PartialComplex {
            diagram: d.clone(),
            order,
            step: 0,
            boundary: vec![],
            matchings: vec![],
            interner: FxHashMap::default(),
            objs: vec![],
            out: vec![],
            inc: vec![],
            live: 0,
            entries: 0,
            stats: ScanStats::default(),
            compose_cache: FxHashMap::default(),
            cycle_count: FxHashMap::default(),
        };
        let m = pc.intern(vec![]);
        pc.push_obj(Obj { m, loops: d.free_loops() as u8, q: 0, h: 0 });
        pc.deloop_all();
        pc.compact();
        pc.note_peaks();
        Ok(pc)
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn total_steps(&self) -> usize {
        self.order.len()
    }

    pub fn is_done(&self) -> bool {
        self.step == self.order.len()
    }

    pub fn object_count(&self) -> usize {
        self.live
    }

    pub fn entry_count(&self) -> usize {
        self.entries
    }

    pub fn boundary(&self) -> &[EdgeId] {
        &self.boundary
    }

    pub fn stats(&self) -> ScanStats {
        self.stats
    }

    /// Rough resident size of the objects and morphisms, in bytes.
    pub fn approx_bytes(&self) -> usize {
        let terms: usize = self.out.iter().flat_map(|o| o.values()).map(|m| m.len()).sum();
        self.objs.len() * 160 + self.entries * 96 + terms * (8 + std::mem::size_of::<F>())
    }

    fn intern(&mut self, m: Vec<u8>) -> u32 {
        if let Some(&id) = self.interner.get(&m) {
            return id;
        }
        let id = self.matchings.len() as u32;
        self.matchings.push(m.clone());
        self.interner.insert(m, id);
        id
    }

    fn push_obj(&mut self, o: Obj) -> u32 {
        self.objs.push(Some(o));
        self.out.push(FxHashMap::default());
        self.inc.push(FxHashSet::default());
        self.live += 1;
        (self.objs.len() - 1) as u32
    }

    fn obj(&self, x: u32) -> Obj {
        self.objs[x as usize].expect("live object")
    }

    fn note_peaks(&mut self) {
        self.stats.peak_objects = self.stats.peak_objects.max(self.live);
        self.stats.peak_entries = self.stats.peak_entries.max(self.entries);
        self.stats.peak_boundary = self.stats.peak_boundary.max(self.boundary.len());
    }

    fn add_entry(&mut self, src: u32, dst: u32, terms: Mor<F>) {
        if terms.is_empty() {
            return;
        }
        let slot = self.out[src as usize].entry(dst).or_default();
        let was_empty = slot.is_empty();
        add_terms(slot, terms);
        let now_empty = slot.is_empty();
        match (was_empty, now_empty) {
            (true, false) => {
                self.inc[dst as usize].insert(src);
                self.entries += 1;
            }
            (false, true) => {
                self.out[src as usize].remove(&dst);
                self.inc[dst as usize].remove(&src);
                self.entries -= 1;
            }
            (true, true) => {
                self.out[src as usize].remove(&dst);
            }
            _ => {}
        }
    }

    fn remove_obj(&mut self, x: u32) {
        let outs = std::mem::take(&mut self.out[x as usize]);
        for dst in outs.keys() {
            self.inc[*dst as usize].remove(&x);
        }
        let incs = std::mem::take(&mut self.inc[x as usize]);
        for src in &incs {
            self.out[*src as usize].remove(&x);
        }
        self.entries -= outs.len() + incs.len();
        self.objs[x as usize] = None;
        self.live -= 1;
    }

    fn nonloop_cycles(&mut self, a: u32, b: u32) -> usize {
        if let Some(&n) = self.cycle_count.get(&(a, b)) {
            return n;
        }
        let n = cycles_of(&self.matchings[a as usize], &self.matchings[b as usize]).1;
        self.cycle_count.insert((a, b), n);
        n
    }

    /// Replace the last loop of object `x` by two loop-free copies with
    /// shifts `+1` (first) and `-1` (second), rewriting adjacent morphisms.
    pub fn deloop(&mut self, x: u32) -> Result<(u32, u32), ScanError> {
        let o = self.obj(x);
        if o.loops == 0 {
            return Err(ScanError::Invariant(format!("object {x} has no loop")));
        }
        let l = o.loops - 1;
        let plus = self.push_obj(Obj { loops: l, q: o.q + 1, ..o });
        let minus = self.push_obj(Obj { loops: l, q: o.q - 1, ..o });
        let outs: Vec<(u32, Mor<F>)> = self.out[x as usize].iter().map(|(k, v)| (*k, v.clone())).collect();
        let incs: Vec<u32> = self.inc[x as usize].iter().copied().collect();
        let incs: Vec<(u32, Mor<F>)> = incs.into_iter().map(|s| (s, self.out[s as usize][&x].clone())).collect();
        self.remove_obj(x);
        for (y, mor) in outs {
            let pos = self.nonloop_cycles(o.m, self.obj(y).m) + l as usize;
            let (mut to_plus, mut to_minus) = (vec![], vec![]);
            for (mask, c) in mor {
                // dotted cap goes to the +1 copy, undotted to the -1 copy
                if mask >> pos & 1 == 1 {
                    to_plus.push((remove_bit(mask, pos), c));
                } else {
                    to_minus.push((remove_bit(mask, pos), c));
                }
            }
            self.add_entry(plus, y, to_plus);
            self.add_entry(minus, y, to_minus);
        }
        for (w, mor) in incs {
            let wo = self.obj(w);
            let pos = self.nonloop_cycles(wo.m, o.m) + wo.loops as usize + l as usize;
            let (mut from_plus, mut from_minus) = (vec![], vec![]);
            for (mask, c) in mor {
                if mask >> pos & 1 == 0 {
                    from_plus.push((remove_bit(mask, pos), c));
                } else {
                    from_minus.push((remove_bit(mask, pos), c));
                }
            }
            self.add_entry(w, plus, from_plus);
            self.add_entry(w, minus, from_minus);
        }
        Ok((plus, minus))
    }

    fn deloop_all(&mut self) {
        let mut stack: Vec<u32> = (0..self.objs.len() as u32).filter(|&x| self.objs[x as usize].is_some_and(|o| o.loops > 0)).collect();
        while let Some(x) = stack.pop() {
            let (p, m) = self.deloop(x).expect("object with a loop");
            if self.obj(p).loops > 0 {
                stack.push(p);
                stack.push(m);
            }
        }
    }

    fn iso_coeff(&self, b: u32, c: u32) -> Option<F> {
        let (ob, oc) = (self.objs[b as usize]?, self.objs[c as usize]?);
        if ob.m != oc.m || ob.q != oc.q || ob.loops != 0 || oc.loops != 0 {
            return None;
        }
        let mor = self.out[b as usize].get(&c)?;
        match mor.as_slice() {
            [(0, coeff)] => Some(coeff.clone()),
            _ => None,
        }
    }

    /// Gaussian elimination of the isomorphism `b -> c`: both objects go and
    /// every other `b2 -> c2` picks up `- gamma phi^{-1} delta`.
    pub fn eliminate(&mut self, b: u32, c: u32) -> Result<(), ScanError> {
        let phi = self.iso_coeff(b, c).ok_or(ScanError::NotInvertible(b, c))?;
        let scale = -(F::one() / phi);
        let mid = self.obj(c).m;
        let deltas: Vec<(u32, Mor<F>)> =
            self.inc[c as usize].iter().filter(|&&s| s != b).map(|&s| (s, self.out[s as usize][&c].clone())).collect();
        let gammas: Vec<(u32, Mor<F>)> =
            self.out[b as usize].iter().filter(|(t, _)| **t != c).map(|(t, m)| (*t, m.clone())).collect();
        self.remove_obj(b);
        self.remove_obj(c);
        for (b2, delta) in &deltas {
            let ma = self.obj(*b2).m;
            for (c2, gamma) in &gammas {
                let mc = self.obj(*c2).m;
                let mut prod = self.compose(ma, mid, mc, delta, gamma);
                prod.iter_mut().for_each(|t| t.1 *= scale.clone());
                self.add_entry(*b2, *c2, prod);
            }
        }
        self.stats.eliminations += 1;
        Ok(())
    }

    /// `gamma ∘ delta` for `delta: A -> M`, `gamma: M -> C`, all loop-free.
    fn compose(&mut self, a: u32, m: u32, c: u32, delta: &Mor<F>, gamma: &Mor<F>) -> Mor<F> {
        let key = (a, m, c);
        if !self.compose_cache.contains_key(&key) {
            let (ma, mm, mc) = (&self.matchings[a as usize], &self.matchings[m as usize], &self.matchings[c as usize]);
            let (lid, nl) = cycles_of(ma, mm);
            let (rid, nr) = cycles_of(mm, mc);
            let glues: Vec<(usize, usize)> =
                (0..mm.len()).filter(|&p| p < mm[p] as usize).map(|p| (lid[p] as usize, nl + rid[p] as usize)).collect();
            let (oid, no) = cycles_of(ma, mc);
            let mut reps = vec![0usize; no];
            for p in (0..ma.len()).rev() {
                reps[oid[p] as usize] = lid[p] as usize;
            }
            self.compose_cache.insert(key, (nl, Topology::build(nl + nr, &glues, &reps)));
        }
        let (nl, topo) = self.compose_cache.get_mut(&key).unwrap();
        let nl = *nl;
        let mut acc: Mor<F> = Vec::new();
        for (m1, c1) in delta {
            for (m2, c2) in gamma {
                let coeff = c1.clone() * c2.clone();
                for &(mask, k) in topo.eval(m1 | m2 << nl) {
                    acc.push((mask, coeff.clone() * F::from_i64(k)));
                }
            }
        }
        let mut out = Vec::new();
        add_terms(&mut out, acc);
        out
    }

    /// Cancel isomorphisms until none are left, cheapest first.
    pub fn simplify(&mut self) {
        loop {
            let mut cands: Vec<(usize, u32, u32)> = Vec::new();
            for (b, outs) in self.out.iter().enumerate() {
                for &c in outs.keys() {
                    if self.iso_coeff(b as u32, c).is_some() {
                        let cost = (self.inc[c as usize].len() - 1) * (outs.len() - 1);
                        cands.push((cost, b as u32, c));
                    }
                }
            }
            if cands.is_empty() {
                return;
            }
            cands.sort_unstable();
            for (_, b, c) in cands {
                if self.iso_coeff(b, c).is_some() {
                    self.eliminate(b, c).expect("checked isomorphism");
                }
            }
        }
    }

    /// Tensor with the next crossing in the scan order, deloop and simplify.
    pub fn add_next_crossing(&mut self) -> Result<(), ScanError> {
        let k = *self.order.get(self.step).ok_or_else(|| ScanError::Invariant("scan already complete".into()))?;
        let x = self.diagram.crossings()[k].clone();
        let nb = self.boundary.len();
        let pos_of: FxHashMap<EdgeId, usize> = self.boundary.iter().enumerate().map(|(p, e)| (*e, p)).collect();

        // how each slot is glued: to an old boundary point, another slot, or nothing
        let mut slot_glue: [Option<usize>; 4] = [None; 4];
        let mut old_glue: Vec<Option<usize>> = vec![None; nb];
        let mut kinks: Vec<(usize, usize)> = Vec::new();
        for s in 0..4 {
            let e = x.edges[s];
            if let Some(&p) = pos_of.get(&e) {
                slot_glue[s] = Some(p);
                old_glue[p] = Some(nb + s);
            } else if let Some(t) = (0..4).find(|&t| t != s && x.edges[t] == e) {
                slot_glue[s] = Some(nb + t);
                if s < t {
                    kinks.push((s, t));
                }
            }
        }
        let mut new_boundary: Vec<EdgeId> = Vec::new();
        let mut new_pos = vec![usize::MAX; nb + 4];
        for p in 0..nb {
            if old_glue[p].is_none() {
                new_pos[p] = new_boundary.len();
                new_boundary.push(self.boundary[p]);
            }
        }
        for s in 0..4 {
            if slot_glue[s].is_none() {
                new_pos[nb + s] = new_boundary.len();
                new_boundary.push(x.edges[s]);
            }
        }
        let glue_of = |u: usize| -> Option<usize> { if u < nb { old_glue[u] } else { slot_glue[u - nb] } };
        let con_of = |u: usize| if u < nb { Con::Old(u) } else { Con::Slot(u - nb) };

        // glue every old matching with both smoothings
        let old_matchings = std::mem::take(&mut self.matchings);
        self.interner.clear();
        self.compose_cache.clear();
        self.cycle_count.clear();
        let used: FxHashSet<u32> = self.objs.iter().flatten().map(|o| o.m).collect();
        let mut glued: FxHashMap<(u32, u8), Glued> = FxHashMap::default();
        let mut used_sorted: Vec<u32> = used.into_iter().collect();
        used_sorted.sort_unstable();
        for &mid in &used_sorted {
            let om = &old_matchings[mid as usize];
            for s in 0..2u8 {
                let pairs = x.smoothing(s);
                let arc = |u: usize| -> usize {
                    if u < nb {
                        om[u] as usize
                    } else {
                        let t = u - nb;
                        let (a, b) = pairs.iter().find(|(a, b)| *a == t || *b == t).copied().unwrap();
                        nb + if a == t { b } else { a }
                    }
                };
                let mut visited = vec![false; nb + 4];
                let mut matching = vec![0u8; new_boundary.len()];
                let mut arc_con = vec![Con::Old(0); new_boundary.len()];
                for u0 in 0..nb + 4 {
                    if visited[u0] || glue_of(u0).is_some() {
                        continue;
                    }
                    let first = con_of(u0);
                    let mut u = u0;
                    let end = loop {
                        visited[u] = true;
                        let v = arc(u);
                        visited[v] = true;
                        match glue_of(v) {
                            None => break v,
                            Some(w) => u = w,
                        }
                    };
                    let (a, b) = (new_pos[u0], new_pos[end]);
                    matching[a] = b as u8;
                    matching[b] = a as u8;
                    arc_con[a] = first;
                    arc_con[b] = first;
                }
                let mut loop_con = Vec::new();
                for u0 in 0..nb + 4 {
                    if visited[u0] {
                        continue;
                    }
                    loop_con.push(con_of(u0));
                    let mut u = u0;
                    loop {
                        visited[u] = true;
                        let v = arc(u);
                        visited[v] = true;
                        u = glue_of(v).expect("closed loop");
                        if u == u0 {
                            break;
                        }
                    }
                }
                let loops = loop_con.len() as u8;
                let m = self.intern(matching);
                glued.insert((mid, s), Glued { m, loops, arc_con, loop_con });
            }
        }

        let ctx = TensorCtx { nb, old_glue: &old_glue, kinks: &kinks, crossing: &x };
        let mut topo_cache: FxHashMap<(u32, u32, Kind), Topology> = FxHashMap::default();

        // new objects: (old object, smoothing) with the loops still attached
        let old_objs = std::mem::take(&mut self.objs);
        let old_out = std::mem::take(&mut self.out);
        self.inc.clear();
        self.live = 0;
        self.entries = 0;
        let mut new_id: Vec<[u32; 2]> = vec![[u32::MAX; 2]; old_objs.len()];
        for (i, o) in old_objs.iter().enumerate() {
            if let Some(o) = o {
                for s in 0..2u8 {
                    let g = &glued[&(o.m, s)];
                    new_id[i][s as usize] = self.push_obj(Obj { m: g.m, loops: g.loops, q: o.q + s as i32, h: o.h + s as i32 });
                }
            }
        }
        for (i, outs) in old_out.iter().enumerate() {
            let Some(o1) = old_objs[i] else { continue };
            let mut dsts: Vec<&u32> = outs.keys().collect();
            dsts.sort_unstable();
            for &j in dsts {
                let f = &outs[&j];
                let o2 = old_objs[j as usize].unwrap();
                for s in 0..2u8 {
                    let key = (o1.m, o2.m, Kind::Id(s));
                    let topo = topo_cache
                        .entry(key)
                        .or_insert_with(|| ctx.topology(&old_matchings, &self.matchings, &glued, key));
                    let mut terms: Mor<F> = Vec::new();
                    for (mask, c) in f {
                        for &(rm, k) in topo.eval(*mask) {
                            terms.push((rm, c.clone() * F::from_i64(k)));
                        }
                    }
                    self.add_entry(new_id[i][s as usize], new_id[j as usize][s as usize], terms);
                }
            }
            let key = (o1.m, o1.m, Kind::Saddle);
            let topo =
                topo_cache.entry(key).or_insert_with(|| ctx.topology(&old_matchings, &self.matchings, &glued, key));
            let sign = if o1.h % 2 == 0 { F::one() } else { -F::one() };
            let terms: Mor<F> = topo.eval(0).iter().map(|&(rm, k)| (rm, sign.clone() * F::from_i64(k))).collect();
            self.add_entry(new_id[i][0], new_id[i][1], terms);
        }
        self.boundary = new_boundary;
        self.note_peaks();
        self.deloop_all();
        self.note_peaks();
        self.simplify();
        self.compact();
        self.step += 1;
        self.stats.steps = self.step;
        log::info!(
            "step {}/{}: crossing {}, boundary {}, objects {}, entries {}",
            self.step,
            self.order.len(),
            k,
            self.boundary.len(),
            self.live,
            self.entries
        );
        Ok(())
    }

    /// Renumber live objects densely.
    fn compact(&mut self) {
        let mut map = vec![u32::MAX; self.objs.len()];
        let mut objs = Vec::with_capacity(self.live);
        for (i, o) in self.objs.iter().enumerate() {
            if let Some(o) = o {
                map[i] = objs.len() as u32;
                objs.push(Some(*o));
            }
        }
        let mut out: Vec<FxHashMap<u32, Mor<F>>> = (0..objs.len()).map(|_| FxHashMap::default()).collect();
        let mut inc: Vec<FxHashSet<u32>> = (0..objs.len()).map(|_| FxHashSet::default()).collect();
        for (i, outs) in std::mem::take(&mut self.out).into_iter().enumerate() {
            if map[i] == u32::MAX {
                continue;
            }
            for (j, m) in outs {
                out[map[i] as usize].insert(map[j as usize], m);
                inc[map[j as usize] as usize].insert(map[i]);
            }
        }
        self.objs = objs;
        self.out = out;
        self.inc = inc;
    }

    /// Exact check that the differential squares to zero and every term has
    /// the degree forced by the quantum shifts.
    pub fn check_invariants(&mut self) -> Result<(), ScanError> {
        let half = self.boundary.len() as i64 / 2;
        let mut all: Vec<(u32, u32)> = Vec::new();
        for (a, outs) in self.out.iter().enumerate() {
            for &b in outs.keys() {
                all.push((a as u32, b));
            }
        }
        for &(a, b) in &all {
            let (oa, ob) = (self.obj(a), self.obj(b));
            if ob.h != oa.h + 1 {
                return Err(ScanError::Invariant(format!("entry {a}->{b} does not raise h by one")));
            }
            let cycles = (self.nonloop_cycles(oa.m, ob.m) + oa.loops as usize + ob.loops as usize) as i64;
            for (mask, _) in &self.out[a as usize][&b] {
                let deg = cycles - half - 2 * mask.count_ones() as i64;
                if deg != (oa.q - ob.q) as i64 {
                    return Err(ScanError::Invariant(format!("entry {a}->{b} has a term of the wrong degree")));
                }
            }
        }
        if self.objs.iter().flatten().any(|o| o.loops > 0) {
            return Ok(());
        }
        for a in 0..self.objs.len() as u32 {
            if self.objs[a as usize].is_none() {
                continue;
            }
            let mut sums: BTreeMap<u32, Mor<F>> = BTreeMap::new();
            let mids: Vec<(u32, Mor<F>)> = self.out[a as usize].iter().map(|(k, v)| (*k, v.clone())).collect();
            for (b, f) in mids {
                let nexts: Vec<(u32, Mor<F>)> = self.out[b as usize].iter().map(|(k, v)| (*k, v.clone())).collect();
                for (c, g) in nexts {
                    let (ma, mb, mc) = (self.obj(a).m, self.obj(b).m, self.obj(c).m);
                    let p = self.compose(ma, mb, mc, &f, &g);
                    add_terms(sums.entry(c).or_default(), p);
                }
            }
            if let Some((c, _)) = sums.iter().find(|(_, m)| !m.is_empty()) {
                return Err(ScanError::Invariant(format!("d^2 != 0 from {a} to {c}")));
            }
        }
        Ok(())
    }

    /// Read off the homology once every crossing is scanned.
    pub fn finish(&self) -> Result<DimTable, ScanError> {
        if !self.is_done() {
            return Err(ScanError::Invariant(format!("scan stopped at step {}/{}", self.step, self.order.len())));
        }
        if self.entries != 0 || !self.boundary.is_empty() {
            return Err(ScanError::Invariant("closed complex still has a differential".into()));
        }
        let (np, nm) = (self.diagram.n_plus() as i64, self.diagram.n_minus() as i64);
        let mut t = DimTable::new();
        for o in self.objs.iter().flatten() {
            t.add(o.h as i64 - nm, o.q as i64 + np - 2 * nm, 1);
        }
        Ok(t)
    }
}

#[derive(Serialize, Deserialize)]
struct CheckpointFile {
    version: u32,
    pd: String,
    order: Vec<usize>,
    step: usize,
    boundary: Vec<EdgeId>,
    matchings: Vec<Vec<u8>>,
    objects: Vec<(u32, u8, i32, i32)>,
    entries: Vec<(u32, u32, Vec<(u64, String)>)>,
    stats: ScanStats,
}

impl<F: Field + FromStr> PartialComplex<F> {
    pub fn save(&mut self, path: &Path) -> Result<(), ScanError> {
        self.compact();
        let mut entries = Vec::with_capacity(self.entries);
        for (a, outs) in self.out.iter().enumerate() {
            let mut keys: Vec<&u32> = outs.keys().collect();
            keys.sort_unstable();
            for b in keys {
                let terms = outs[b].iter().map(|(m, c)| (*m, c.to_string())).collect();
                entries.push((a as u32, *b, terms));
            }
        }
        let file = CheckpointFile {
            version: CHECKPOINT_VERSION,
            pd: self.diagram.to_pd_string(),
            order: self.order.clone(),
            step: self.step,
            boundary: self.boundary.clone(),
            matchings: self.matchings.clone(),
            objects: self.objs.iter().flatten().map(|o| (o.m, o.loops, o.q, o.h)).collect(),
            entries,
            stats: self.stats,
        };
        let text = serde_json::to_string(&file).map_err(|e| ScanError::Checkpoint(e.to_string()))?;
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, text).map_err(|e| ScanError::Checkpoint(e.to_string()))?;
        std::fs::rename(&tmp, path).map_err(|e| ScanError::Checkpoint(e.to_string()))
    }

    pub fn load(d: &Diagram, path: &Path) -> Result<Self, ScanError> {
        let text = std::fs::read_to_string(path).map_err(|e| ScanError::Checkpoint(e.to_string()))?;
        let file: CheckpointFile = serde_json::from_str(&text).map_err(|e| ScanError::Checkpoint(e.to_string()))?;
        if file.version != CHECKPOINT_VERSION {
            return Err(ScanError::Checkpoint(format!("unsupported version {}", file.version)));
        }
        if file.pd != d.to_pd_string() {
            return Err(ScanError::Checkpoint("checkpoint belongs to a different diagram".into()));
        }
        let mut pc = PartialComplex::new(d, file.order)?;
        pc.step = file.step;
        pc.boundary = file.boundary;
        pc.matchings = vec![];
        pc.interner.clear();
        for m in file.matchings {
            pc.intern(m);
        }
        pc.objs.clear();
        pc.out.clear();
        pc.inc.clear();
        pc.live = 0;
        pc.entries = 0;
        for (m, loops, q, h) in file.objects {
            pc.push_obj(Obj { m, loops, q, h });
        }
        for (a, b, terms) in file.entries {
            let mut mor = Vec::with_capacity(terms.len());
            for (mask, c) in terms {
                let c = F::from_str(&c).map_err(|_| ScanError::Checkpoint(format!("bad coefficient {c}")))?;
                mor.push((mask, c));
            }
            pc.add_entry(a, b, mor);
        }
        pc.stats = file.stats;
        Ok(pc)
    }
}

/// Run the scan to completion under the given options.
pub fn scan_with<F: Field + FromStr>(d: &Diagram, opts: &ScanOptions) -> Result<(DimTable, ScanStats), ScanError> {
    let order = opts.order.clone().unwrap_or_else(|| scan_order(d));
    let mut pc = match &opts.checkpoint {
        Some(p) if p.exists() => {
            let pc = PartialComplex::<F>::load(d, p)?;
            log::info!("resumed from {} at step {}/{}", p.display(), pc.step(), pc.total_steps());
            pc
        }
        _ => PartialComplex::<F>::new(d, order)?,
    };
    let start = Instant::now();
    while !pc.is_done() {
        pc.add_next_crossing()?;
        if opts.verify {
            pc.check_invariants()?;
        }
        if let Some(p) = &opts.checkpoint {
            pc.save(p)?;
        }
        let b = &opts.budget;
        let reason = if b.max_objects.is_some_and(|m| pc.object_count() > m) {
            Some("object ceiling".to_string())
        } else if b.max_seconds.is_some_and(|s| start.elapsed().as_secs_f64() > s) {
            Some("time limit".to_string())
        } else if b.max_memory_mb.is_some_and(|mb| pc.approx_bytes() > mb << 20) {
            Some("memory limit".to_string())
        } else {
            None
        };
        if let Some(reason) = reason {
            if pc.is_done() {
                break;
            }
            return Err(ScanError::Budget {
                step: pc.step(),
                total: pc.total_steps(),
                objects: pc.object_count(),
                entries: pc.entry_count(),
                reason,
            });
        }
    }
    Ok((pc.finish()?, pc.stats()))
}

/// Rational Khovanov homology by scanning.
pub fn reduced_kh(d: &Diagram, budget: &ScanBudget) -> Result<DimTable, ScanError> {
    let opts = ScanOptions { budget: budget.clone(), ..Default::default() };
    scan_with::<crate::Rat>(d, &opts).map(|r| r.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::khcomplex::khovanov_homology;
    use crate::knotio::{catalog_get, scan_order_from};
    use crate::{ModField, Rat};

    fn verified(d: &Diagram, order: Option<Vec<usize>>) -> (DimTable, ScanStats) {
        let opts = ScanOptions { verify: true, order, ..Default::default() };
        scan_with::<Rat>(d, &opts).unwrap()
    }

    #[test]
    fn cycles_of_union() {
        // identical matchings: one cycle per arc
        assert_eq!(cycles_of(&[1, 0, 3, 2], &[1, 0, 3, 2]).1, 2);
        assert_eq!(cycles_of(&[1, 0, 3, 2], &[3, 2, 1, 0]).1, 1);
    }

    #[test]
    fn topology_neck_cutting() {
        // two disks glued along two intervals, two boundary cycles: a cylinder
        let mut t = Topology::build(2, &[(0, 1), (0, 1)], &[0, 1]);
        assert_eq!(t.eval(0), &[(0b10, 1), (0b01, 1)]);
        assert_eq!(t.eval(1), &[(0b11, 1)]);
        assert!(t.eval(3).is_empty());
        // closed torus from two disks glued along two intervals, no boundary
        let mut torus = Topology::build(2, &[(0, 1), (1, 0)], &[]);
        assert_eq!(torus.eval(0), &[(0, 2)]);
    }

    #[test]
    fn unknots() {
        let want = DimTable::from_cells([((0, -1), 1), ((0, 1), 1)]);
        for name in ["unknot", "unknot_r1", "unknot_r2"] {
            assert_eq!(verified(&catalog_get(name).unwrap(), None).0, want, "{name}");
        }
    }

    #[test]
    fn trefoil_matches_cube() {
        let d = catalog_get("trefoil_r").unwrap();
        assert_eq!(verified(&d, None).0, khovanov_homology(&d).unwrap());
    }

    #[test]
    fn deloop_splits_shifts() {
        let d = catalog_get("unknot").unwrap();
        let mut pc = PartialComplex::<Rat>::new(&d, vec![]).unwrap();
        let mut qs: Vec<i32> = pc.objs.iter().flatten().map(|o| o.q).collect();
        qs.sort();
        assert_eq!(qs, vec![-1, 1]);
        assert!(pc.deloop(0).is_err());
    }

    #[test]
    fn eliminate_requires_iso() {
        let d = catalog_get("unknot").unwrap();
        let mut pc = PartialComplex::<Rat>::new(&d, vec![]).unwrap();
        assert!(matches!(pc.eliminate(0, 1), Err(ScanError::NotInvertible(0, 1))));
    }

    #[test]
    fn small_catalog_orders_and_fields() {
        for name in ["figure8", "5_2", "6_1", "8_19", "8_20"] {
            let d = catalog_get(name).unwrap();
            let cube = khovanov_homology(&d).unwrap();
            assert_eq!(verified(&d, None).0, cube, "{name}");
            for start in [1, d.crossing_count() - 1] {
                assert_eq!(verified(&d, Some(scan_order_from(&d, start))).0, cube, "{name} from {start}");
            }
            let modp = scan_with::<ModField>(&d, &ScanOptions::default()).unwrap().0;
            assert_eq!(modp, cube, "{name} mod p");
        }
    }

    #[test]
    fn checkpoint_round_trip() {
        let d = catalog_get("6_2").unwrap();
        let dir = std::env::temp_dir().join(format!("khscan-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cp.json");
        let mut pc = PartialComplex::<Rat>::new(&d, scan_order(&d)).unwrap();
        for _ in 0..3 {
            pc.add_next_crossing().unwrap();
        }
        pc.save(&path).unwrap();
        let opts = ScanOptions { checkpoint: Some(path.clone()), ..Default::default() };
        let (t, _) = scan_with::<Rat>(&d, &opts).unwrap();
        assert_eq!(t, khovanov_homology(&d).unwrap());
        assert!(PartialComplex::<Rat>::load(&catalog_get("trefoil_r").unwrap(), &path).is_err());
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn budget_reports_progress() {
        let d = catalog_get("8_19").unwrap();
        let budget = ScanBudget { max_objects: Some(0), ..Default::default() };
        match reduced_kh(&d, &budget) {
            Err(ScanError::Budget { step, total, .. }) => assert!(step >= 1 && step < total),
            other => panic!("{other:?}"),
        }
    }
}
