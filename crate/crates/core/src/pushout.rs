//! Relative circle products, enveloping sequences `O_A[q]`, the tensor
//! cubes `Q^t_q` and pushouts of algebras along free maps.
//!
//! Everything is a cokernel of `d0 − d1` between layered forests. Cells
//! live in degrees ≥ 1 (slots of enveloping sequences in degree 0), so the
//! degree budget bounds every arity.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::io::AlgebraFile;
use crate::algebra::{koszul, Algebra};
use crate::bar::derived::RightModule;
use crate::bar::{prepare, BarError};
use crate::chain::{ChainBuilder, ChainComplex, ChainError, ChainMap, Quotient};
use crate::exactalg::{Accumulator, CoeffRing, Reducer, Scalar, SparseVec};
use crate::forest::{Filter, Forest, ForestError, LayerSpec, Node};
use crate::operad::Op;

#[derive(Debug, thiserror::Error)]
pub enum PushoutError {
    #[error("{0}")]
    Invalid(String),
    #[error("direct and filtered pushouts disagree: {0}")]
    Mismatch(String),
    #[error("{0}")]
    Internal(String),
    #[error(transparent)]
    Bar(#[from] BarError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

fn need_field(ring: CoeffRing) -> Result<(), PushoutError> {
    if ring.is_field() {
        Ok(())
    } else {
        Err(PushoutError::Invalid(format!("pushouts and cubes are computed over fields, not {ring}")))
    }
}

fn positive(c: &ChainComplex, what: &str) -> Result<(), PushoutError> {
    match c.min_degree() {
        Some(d) if d < 1 => Err(PushoutError::Invalid(format!("{what} has cells in degree {d}; degrees must be ≥ 1"))),
        _ => Ok(()),
    }
}

fn relations(ring: CoeffRing, n: usize, d0: impl Fn(u32) -> SparseVec, d1: impl Fn(u32) -> SparseVec) -> Vec<SparseVec> {
    (0..n as u32).map(|i| d0(i).sub(ring, &d1(i))).filter(|v| !v.is_empty()).collect()
}

fn unit_or_zero(v: Option<u32>) -> SparseVec {
    v.map_or_else(SparseVec::new, |i| SparseVec::unit(i as usize))
}

/// `N ∘_O X` as the cokernel of `d0 − d1: N∘O∘X → N∘X`, where `d0` is the
/// right action of `N` and `d1` the action on `X`. Exact through degree `dtot`.
pub fn relative_circle(n: RightModule, x: &Arc<Algebra>, dtot: i32) -> Result<ChainComplex, PushoutError> {
    let x = prepare(x, dtot)?;
    positive(&x.carrier, "the algebra")?;
    let ring = x.ring();
    let (lo, hi) = n.band();
    let hi = hi.min(dtot.max(1) as usize);
    let mut f = Forest::new(&x.operad, &x.carrier, &[]);
    let l1 = f.add_layer(0, LayerSpec::band(1, dtot.max(1) as usize, dtot), &Filter::default())?;
    let r1 = f.add_layer(l1, LayerSpec::band(lo, hi, dtot), &Filter::default())?;
    let r0 = f.add_layer(0, LayerSpec::band(lo, hi, dtot), &Filter::default())?;
    let act = |k: u32| {
        let node = f.node(l1, k);
        x.act(node.op, &node.kids)
    };
    let rels = relations(ring, f.layer(r1).len(), |i| f.merge(r1, i, r0), |i| f.map_kids(r1, i, r0, &act));
    let (c, _) = f.layer_complex(r0, |_| true);
    Ok(Quotient::new(&c, &rels)?.complex)
}

/// `O_A[q]` with its right `Σ_q`-action, exact through degree `dtot`.
pub struct Enveloping {
    pub q: usize,
    pub complex: ChainComplex,
    forest: Forest,
    root: usize,
    quotient: Quotient,
    /// Number of carrier leaves; slot `j` is leaf `carrier + j`.
    carrier: usize,
}

impl Enveloping {
    /// The basis cell of the forest root behind each quotient cell.
    fn root_cell(&self, i: usize) -> u32 {
        self.quotient.kept[i]
    }

    /// Matrix of `x ↦ x·σ` on the complex.
    pub fn action(&self, sigma: &[usize]) -> Vec<SparseVec> {
        assert_eq!(sigma.len(), self.q);
        let inv = crate::symseq::perm::inverse(sigma);
        let na = self.carrier as u32;
        let relabel = |leaf: u32| {
            if leaf >= na {
                SparseVec::unit((na as usize) + inv[(leaf - na) as usize])
            } else {
                SparseVec::unit(leaf as usize)
            }
        };
        (0..self.complex.len())
            .map(|i| self.quotient.project(&self.forest.map_kids(self.root, self.root_cell(i), self.root, &relabel)))
            .collect()
    }

    /// The root cell `(op; slots in order)` over the slots alone, when present.
    pub fn operation(&self, op: Op) -> Option<SparseVec> {
        let kids: Vec<u32> = (0..self.q as u32).map(|j| self.carrier as u32 + j).collect();
        let (i, s) = self.forest.normal(self.root, op, &kids)?;
        let ring = self.complex.ring;
        Some(self.quotient.project(&SparseVec::single(i as usize, ring.sign(s))))
    }
}

/// `O_A[q]` as the cokernel of `∐_p O[p+q] ⊗_{Σ_p} (O∘A)^{⊗p} → ∐_p O[p+q] ⊗_{Σ_p} A^{⊗p}`
/// with `d0` operad composition and `d1` the action on `A`.
pub fn enveloping(x: &Arc<Algebra>, q: usize, dtot: i32) -> Result<Enveloping, PushoutError> {
    if q > 31 {
        return Err(PushoutError::Invalid("at most 31 slots".into()));
    }
    let x = prepare(x, dtot + q as i32)?;
    positive(&x.carrier, "the algebra")?;
    let ring = x.ring();
    let na = x.carrier.len();
    let mut b = ChainBuilder::new(ring);
    for j in 0..q {
        b.add_cell(format!("s{j}"), 0);
    }
    let leaves = x.carrier.direct_sum(&b.build_unchecked())?;
    let slots: Vec<usize> = (na..na + q).collect();
    let full: u32 = if q == 0 { 0 } else { (1u32 << q) - 1 };
    let hi = dtot.max(1) as usize + q;
    let mut f = Forest::new(&x.operad, &leaves, &slots);
    let operad = x.operad.clone();
    let over_a = |op: Op, kids: &[u32]| kids.iter().all(|&k| (k as usize) < na) || (kids.len() == 1 && operad.is_unit(op));
    let l1 = f.add_layer(0, LayerSpec::band(1, hi, dtot), &Filter { op: Some(&over_a), ..Filter::default() })?;
    let lins: Vec<u32> = f.layer(l1).nodes.iter().map(|n| n.lin).collect();
    let all_slots = |kids: &[u32]| kids.iter().fold(0, |m, &k| m | lins[k as usize]) == full;
    let r1 = f.add_layer(l1, LayerSpec::band(q.max(1), hi, dtot), &Filter { kids: Some(&all_slots), ..Filter::default() })?;
    let uses_all = |kids: &[u32]| kids.iter().filter(|&&k| k as usize >= na).count() == q;
    let r0 = f.add_layer(0, LayerSpec::band(q.max(1), hi, dtot), &Filter { kids: Some(&uses_all), ..Filter::default() })?;
    let act = |k: u32| {
        let node = f.node(l1, k);
        if node.kids.iter().all(|&c| (c as usize) < na) {
            x.act(node.op, &node.kids)
        } else {
            SparseVec::unit(node.kids[0] as usize)
        }
    };
    let rels = relations(ring, f.layer(r1).len(), |i| f.merge(r1, i, r0), |i| f.map_kids(r1, i, r0, &act));
    let (c, _) = f.layer_complex(r0, |_| true);
    let quotient = Quotient::new(&c, &rels)?;
    Ok(Enveloping { q, complex: quotient.complex.clone(), forest: f, root: r0, quotient, carrier: na })
}

/// The ordered tensor power `Y^{⊗t}` through a degree budget, on tuples of cells.
pub struct TensorPower {
    pub t: usize,
    pub complex: ChainComplex,
    pub tuples: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, u32>,
    parity: Vec<bool>,
}

impl TensorPower {
    /// Tuples whose entry at position `p` satisfies `allow(p, cell)`; the
    /// allowed cells at each position must span a subcomplex.
    pub fn new(y: &ChainComplex, t: usize, budget: i32, allow: &dyn Fn(usize, u32) -> bool) -> TensorPower {
        let ring = y.ring;
        let min = y.min_degree().unwrap_or(0).max(0);
        let mut tuples = Vec::new();
        let mut cur = Vec::with_capacity(t);
        fn go(y: &ChainComplex, t: usize, budget: i32, min: i32, allow: &dyn Fn(usize, u32) -> bool, deg: i32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if cur.len() == t {
                out.push(cur.clone());
                return;
            }
            let rest = (t - cur.len() - 1) as i32 * min;
            for c in 0..y.len() as u32 {
                let d = y.degree(c as usize);
                if deg + d + rest <= budget && allow(cur.len(), c) {
                    cur.push(c);
                    go(y, t, budget, min, allow, deg + d, cur, out);
                    cur.pop();
                }
            }
        }
        go(y, t, budget, min, allow, 0, &mut cur, &mut tuples);
        let index: HashMap<Vec<u32>, u32> = tuples.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        let mut b = ChainBuilder::new(ring);
        for w in &tuples {
            let label = if w.is_empty() { "1".to_string() } else { w.iter().map(|&c| y.label(c as usize)).collect::<Vec<_>>().join("⊗") };
            b.add_cell(label, w.iter().map(|&c| y.degree(c as usize)).sum());
        }
        for (i, w) in tuples.iter().enumerate() {
            let mut acc = Accumulator::new();
            let mut pre = 0;
            for p in 0..t {
                let s = ring.sign(if pre % 2 == 0 { 1 } else { -1 });
                for (k, c) in y.diff(w[p] as usize).iter() {
                    let mut w2 = w.clone();
                    w2[p] = k as u32;
                    if let Some(&j) = index.get(&w2) {
                        acc.add(ring, j as usize, &ring.mul(&s, c));
                    }
                }
                pre += y.degree(w[p] as usize);
            }
            b.set_diff(i, acc.finish());
        }
        let parity = (0..y.len()).map(|c| y.degree(c).rem_euclid(2) == 1).collect();
        TensorPower { t, complex: b.build_unchecked(), tuples, index, parity }
    }

    pub fn find(&self, w: &[u32]) -> Option<u32> {
        self.index.get(w).copied()
    }

    /// `(y_1 ⊗ ⋯ ⊗ y_t)·σ = ± y_{σ(1)} ⊗ ⋯ ⊗ y_{σ(t)}`.
    pub fn act(&self, v: &SparseVec, sigma: &[usize]) -> SparseVec {
        let ring = self.complex.ring;
        let mut acc = Accumulator::new();
        for (i, c) in v.iter() {
            let w = &self.tuples[i];
            let w2: Vec<u32> = sigma.iter().map(|&j| w[j]).collect();
            let s = koszul(sigma, &|j| self.parity[w[j] as usize]);
            if let Some(j) = self.find(&w2) {
                acc.add(ring, j as usize, &ring.mul(c, &ring.sign(s)));
            }
        }
        acc.finish()
    }
}

/// `Q^t_q`: the part of `Y^{⊗t}` with at least `t − q` factors in `X`,
/// built by the inductive pushouts, with its embedding into `Y^{⊗t}`.
pub struct Cube {
    pub t: usize,
    pub q: usize,
    pub complex: ChainComplex,
    pub into: Vec<SparseVec>,
    pub power: Arc<TensorPower>,
}

impl Cube {
    fn solver(&self) -> Reducer {
        let mut red = Reducer::tracking(self.complex.ring);
        for v in &self.into {
            red.insert(v);
        }
        red
    }

    /// Matrix of the restricted `Σ_t`-action.
    pub fn action(&self, sigma: &[usize]) -> Result<Vec<SparseVec>, PushoutError> {
        let red = self.solver();
        self.into
            .iter()
            .map(|v| red.solve(&self.power.act(v, sigma)).ok_or_else(|| PushoutError::Internal("Q^t_q is not Σ_t-stable".into())))
            .collect()
    }
}

/// Builds the cubes for a cell inclusion `X ⊂ Y`.
pub struct CubeBuilder {
    y: ChainComplex,
    in_x: Vec<bool>,
    budget: i32,
    powers: HashMap<usize, Arc<TensorPower>>,
    memo: HashMap<(usize, usize), Arc<Cube>>,
}

/// Checks `i` maps cells to distinct cells with coefficient one and returns
/// the image indices.
pub fn cell_inclusion(i: &ChainMap) -> Result<Vec<u32>, PushoutError> {
    let ring = i.target.ring;
    let mut seen = vec![false; i.target.len()];
    let mut out = Vec::new();
    for c in 0..i.source.len() {
        let v = i.apply(&SparseVec::unit(c));
        match v.entries() {
            [(j, s)] if *s == ring.one() && !seen[*j as usize] => {
                seen[*j as usize] = true;
                out.push(*j);
            }
            _ => return Err(PushoutError::Invalid(format!("cell {} does not map to a single cell", i.source.label(c)))),
        }
    }
    Ok(out)
}

impl CubeBuilder {
    pub fn new(i: &ChainMap, budget: i32) -> Result<Self, PushoutError> {
        need_field(i.target.ring)?;
        positive(&i.target, "Y")?;
        let mut in_x = vec![false; i.target.len()];
        for j in cell_inclusion(i)? {
            in_x[j as usize] = true;
        }
        Ok(CubeBuilder { y: (*i.target).clone(), in_x, budget, powers: HashMap::new(), memo: HashMap::new() })
    }

    pub fn power(&mut self, t: usize) -> Arc<TensorPower> {
        if let Some(p) = self.powers.get(&t) {
            return p.clone();
        }
        let p = Arc::new(TensorPower::new(&self.y, t, self.budget, &|_, _| true));
        self.powers.insert(t, p.clone());
        p
    }

    pub fn cube(&mut self, t: usize, q: usize) -> Result<Arc<Cube>, PushoutError> {
        assert!(q <= t);
        if let Some(c) = self.memo.get(&(t, q)) {
            return Ok(c.clone());
        }
        let power = self.power(t);
        let c = if q == t {
            Cube { t, q, complex: power.complex.clone(), into: (0..power.tuples.len()).map(SparseVec::unit).collect(), power }
        } else if q == 0 {
            let in_x = &self.in_x;
            let sub = TensorPower::new(&self.y, t, self.budget, &|_, c| in_x[c as usize]);
            let into = sub.tuples.iter().map(|w| unit_or_zero(power.find(w))).collect();
            Cube { t, q, complex: sub.complex, into, power }
        } else {
            self.glue(t, q, power)?
        };
        let c = Arc::new(c);
        self.memo.insert((t, q), c.clone());
        Ok(c)
    }

    /// The pushout of `Q^t_{q−1} ← Σ_t·(X^{⊗(t−q)} ⊗ Q^q_{q−1}) → Σ_t·(X^{⊗(t−q)} ⊗ Y^{⊗q})`.
    fn glue(&mut self, t: usize, q: usize, power: Arc<TensorPower>) -> Result<Cube, PushoutError> {
        let ring = self.y.ring;
        let u = self.cube(t, q - 1)?;
        let inner = self.cube(q, q - 1)?;
        let xs = {
            let in_x = &self.in_x;
            TensorPower::new(&self.y, t - q, self.budget, &|_, c| in_x[c as usize])
        };
        let parity: Vec<bool> = (0..self.y.len()).map(|c| self.y.degree(c).rem_euclid(2) == 1).collect();
        let usolve = u.solver();
        let mut ambient = u.complex.clone();
        let mut rels = Vec::new();
        let mut pieces: Vec<(usize, TensorPower)> = Vec::new();
        for set in subsets(t, q) {
            let in_t: Vec<bool> = (0..t).map(|p| set.contains(&p)).collect();
            let vt = {
                let in_x = &self.in_x;
                TensorPower::new(&self.y, t, self.budget, &|p, c| in_t[p] || in_x[c as usize])
            };
            let off = ambient.len();
            for xw in &xs.tuples {
                let xdeg: i32 = xw.iter().map(|&c| self.y.degree(c as usize)).sum();
                for (cell, img) in inner.into.iter().enumerate() {
                    if xdeg + inner.complex.degree(cell) > self.budget {
                        continue;
                    }
                    // The positional image of x ⊗ c, with the shuffle sign.
                    let mut acc = Accumulator::new();
                    for (k, coef) in img.iter() {
                        let yw = &inner.power.tuples[k];
                        let concat: Vec<u32> = xw.iter().chain(yw.iter()).copied().collect();
                        let (mut a, mut b) = (0, t - q);
                        let w: Vec<usize> = (0..t)
                            .map(|p| {
                                if in_t[p] {
                                    b += 1;
                                    b - 1
                                } else {
                                    a += 1;
                                    a - 1
                                }
                            })
                            .collect();
                        let s = koszul(&w, &|j| parity[concat[j] as usize]);
                        let pos: Vec<u32> = w.iter().map(|&j| concat[j]).collect();
                        let j = vt.find(&pos).ok_or_else(|| PushoutError::Internal("tuple outside its summand".into()))?;
                        acc.add(ring, j as usize, &ring.mul(coef, &ring.sign(s)));
                    }
                    let in_v = acc.finish();
                    let full = in_v.remap(ring, |j| power.find(&vt.tuples[j]).map(|x| x as usize));
                    let pr = usolve.solve(&full).ok_or_else(|| PushoutError::Internal("pr_* leaves Q^t_{q-1}".into()))?;
                    rels.push(pr.sub(ring, &in_v.remap(ring, |j| Some(j + off))));
                }
            }
            ambient = ambient.direct_sum(&vt.complex)?;
            pieces.push((off, vt));
        }
        let quot = Quotient::new(&ambient, &rels)?;
        let into: Vec<SparseVec> = quot
            .kept
            .iter()
            .map(|&a| {
                let a = a as usize;
                if a < u.complex.len() {
                    return u.into[a].clone();
                }
                let (off, vt) = pieces.iter().rev().find(|(off, _)| *off <= a).unwrap();
                unit_or_zero(power.find(&vt.tuples[a - off]))
            })
            .collect();
        let mut red = Reducer::new(ring);
        for v in &into {
            red.insert(v);
        }
        if red.rank() != into.len() {
            return Err(PushoutError::Internal(format!("Q^{t}_{q} does not embed in Y^⊗{t}")));
        }
        Ok(Cube { t, q, complex: quot.complex, into, power })
    }
}

/// `q`-element subsets of `0..t` in lexicographic order.
fn subsets(t: usize, q: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, t: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for i in start..t {
            cur.push(i);
            go(i + 1, t, q, cur, out);
            cur.pop();
        }
    }
    go(0, t, q, &mut cur, &mut out);
    out
}

/// `Q^t_q(i)`, exact through degree `budget`.
pub fn cube(i: &ChainMap, t: usize, q: usize, budget: i32) -> Result<Arc<Cube>, PushoutError> {
    if q > t {
        return Err(PushoutError::Invalid(format!("need q ≤ t, got q = {q}, t = {t}")));
    }
    CubeBuilder::new(i, budget)?.cube(t, q)
}

/// The data of a pushout `A ⊔_{O∘X} O∘Y` along `O∘(i)`, with `f: O∘X → A`
/// given on generators.
pub struct PushoutData {
    pub algebra: Arc<Algebra>,
    /// `X → A` on underlying complexes.
    pub f: ChainMap,
    /// A cell inclusion `X → Y`.
    pub i: ChainMap,
}

impl PushoutData {
    pub fn new(algebra: Arc<Algebra>, f: ChainMap, i: ChainMap) -> Result<Self, PushoutError> {
        if f.source.len() != i.source.len() || (0..f.source.len()).any(|c| f.source.degree(c) != i.source.degree(c)) {
            return Err(PushoutError::Invalid("f and i must share their source X".into()));
        }
        let a = &algebra.carrier;
        if f.target.len() != a.len() || (0..a.len()).any(|c| f.target.degree(c) != a.degree(c)) {
            return Err(PushoutError::Invalid("f must land in the carrier of A".into()));
        }
        need_field(algebra.ring())?;
        positive(a, "A")?;
        positive(&i.target, "Y")?;
        cell_inclusion(&i)?;
        Ok(PushoutData { algebra, f, i })
    }
}

/// The filtration `A = A_0 → A_1 → ⋯` of the pushout, per degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Filtered {
    /// `dim (A_t)_n`.
    pub stages: Vec<BTreeMap<i32, usize>>,
    /// `dim (O_A[t] ⊗_{Σ_t} Y^{⊗t})_n`.
    pub cells: Vec<BTreeMap<i32, usize>>,
    /// `dim (O_A[t] ⊗_{Σ_t} Q^t_{t−1})_n`.
    pub attached: Vec<BTreeMap<i32, usize>>,
}

pub struct Pushout {
    pub dtot: i32,
    pub direct: ChainComplex,
    pub filtered: Filtered,
}

fn dims_through(c: &ChainComplex, dtot: i32) -> BTreeMap<i32, usize> {
    c.dims().into_iter().filter(|&(d, n)| d <= dtot && n > 0).collect()
}

/// Leaves `A ⊕ Y` (and a copy of `X` when `with_x`), a first layer of
/// `O∘A` plus units over the other leaves, and a root over it.
struct Presentation {
    forest: Forest,
    alg: Arc<Algebra>,
    na: usize,
    ny: usize,
    l1: usize,
    r1: usize,
}

fn present(data: &PushoutData, dtot: i32, with_x: bool) -> Result<Presentation, PushoutError> {
    let alg = prepare(&data.algebra, dtot)?;
    let na = alg.carrier.len();
    let ny = data.i.target.len();
    let mut leaves = alg.carrier.direct_sum(&data.i.target)?;
    if with_x {
        leaves = leaves.direct_sum(&data.i.source)?;
    }
    let hi = dtot.max(1) as usize;
    let mut f = Forest::new(&alg.operad, &leaves, &[]);
    let operad = alg.operad.clone();
    let over_a = |op: Op, kids: &[u32]| kids.iter().all(|&k| (k as usize) < na) || (kids.len() == 1 && operad.is_unit(op));
    let l1 = f.add_layer(0, LayerSpec::band(1, hi, dtot), &Filter { op: Some(&over_a), ..Filter::default() })?;
    let r1 = f.add_layer(l1, LayerSpec::band(1, hi, dtot), &Filter::default())?;
    Ok(Presentation { forest: f, alg, na, ny, l1, r1 })
}

impl Presentation {
    fn is_a_node(&self, k: u32) -> bool {
        self.forest.node(self.l1, k).kids.iter().all(|&c| (c as usize) < self.na)
    }

    /// `d1` on a first-layer node: the action on `A`, `x ↦ f(x)`, and the identity elsewhere.
    fn d1_kid(&self, k: u32, f: Option<&ChainMap>) -> SparseVec {
        let node = self.forest.node(self.l1, k);
        if self.is_a_node(k) {
            return self.alg.act(node.op, &node.kids);
        }
        let leaf = node.kids[0] as usize;
        if leaf < self.na + self.ny {
            SparseVec::unit(leaf)
        } else {
            f.expect("X leaves need f").apply(&SparseVec::unit(leaf - self.na - self.ny))
        }
    }
}

/// The pushout as the cokernel of `O∘(O∘A ⊕ X ⊕ Y) ⇉ O∘(A ⊕ Y)`.
pub fn pushout_direct(data: &PushoutData, dtot: i32) -> Result<ChainComplex, PushoutError> {
    let mut p = present(data, dtot, true)?;
    let (na, ny) = (p.na, p.ny);
    let ring = p.alg.ring();
    let hi = dtot.max(1) as usize;
    let all = p.forest.add_layer(0, LayerSpec::band(1, hi, dtot), &Filter::default())?;
    let no_x = |k: u32| (k as usize) < na + ny;
    let r0 = p.forest.add_layer(0, LayerSpec::band(1, hi, dtot), &Filter { kid: Some(&no_x), ..Filter::default() })?;
    let incl: Vec<u32> = cell_inclusion(&data.i)?;
    let sub = |leaf: u32| {
        let leaf = leaf as usize;
        if leaf < na + ny {
            SparseVec::unit(leaf)
        } else {
            SparseVec::unit(na + incl[leaf - na - ny] as usize)
        }
    };
    let f = &p.forest;
    let d0 = |i: u32| {
        let mut acc = Accumulator::new();
        for (j, c) in f.merge(p.r1, i, all).iter() {
            acc.add_vec(ring, c, &f.map_kids(all, j as u32, r0, &sub));
        }
        acc.finish()
    };
    let d1 = |i: u32| f.map_kids(p.r1, i, r0, &|k| p.d1_kid(k, Some(&data.f)));
    let rels = relations(ring, f.layer(p.r1).len(), d0, d1);
    let (c, _) = f.layer_complex(r0, |_| true);
    Ok(Quotient::new(&c, &rels)?.complex)
}

/// The pushout as `colim_t A_t`, each `A_t` glued from `A_{t−1}` along
/// `O_A[t] ⊗_{Σ_t} Q^t_{t−1} → O_A[t] ⊗_{Σ_t} Y^{⊗t}`.
pub fn pushout_filtered(data: &PushoutData, dtot: i32) -> Result<Filtered, PushoutError> {
    let mut p = present(data, dtot, false)?;
    let (na, ny) = (p.na, p.ny);
    let ring = p.alg.ring();
    let hi = dtot.max(1) as usize;
    let r0 = p.forest.add_layer(0, LayerSpec::band(1, hi, dtot), &Filter::default())?;
    let incl = cell_inclusion(&data.i)?;
    let mut in_x = vec![false; na + ny];
    for &j in &incl {
        in_x[na + j as usize] = true;
    }
    let f = &p.forest;
    let weight = |n: &Node| (n.kids.iter().filter(|&&k| k as usize >= na).count(), n.kids.iter().filter(|&&k| in_x[k as usize]).count());
    let root_weight = |i: u32| {
        let n = f.node(p.r1, i);
        let leaves: Vec<u32> = n.kids.iter().filter(|&&k| !p.is_a_node(k)).map(|&k| f.node(p.l1, k).kids[0]).collect();
        (leaves.len(), leaves.iter().filter(|&&k| in_x[k as usize]).count())
    };
    let mut cubes = CubeBuilder::new(&data.i, dtot)?;
    let mut out = Filtered { stages: Vec::new(), cells: Vec::new(), attached: Vec::new() };
    let mut running: BTreeMap<i32, usize> = BTreeMap::new();
    let n1 = f.layer(p.r1).len() as u32;
    for t in 0..=dtot.max(0) as usize {
        if t >= 1 {
            // `Q^t_{t−1}` is the span of tuples with a factor in X.
            let c = cubes.cube(t, t - 1)?;
            let mut red = Reducer::new(ring);
            for v in &c.into {
                if v.indices().any(|j| c.power.tuples[j].iter().all(|&y| !in_x[na + y as usize])) {
                    return Err(PushoutError::Internal(format!("Q^{t}_{} leaves the X-tuples", t - 1)));
                }
                red.insert(v);
            }
            let want = c.power.tuples.iter().filter(|w| w.iter().any(|&y| in_x[na + y as usize])).count();
            if red.rank() != want || red.rank() != c.into.len() {
                return Err(PushoutError::Internal(format!("Q^{t}_{} has rank {} but {want} X-tuples", t - 1, red.rank())));
            }
        }
        let piece = |need_x: bool| -> Result<(Quotient, Vec<Option<u32>>), PushoutError> {
            let keep = |n: &Node| {
                let (w, x) = weight(n);
                w == t && (!need_x || x >= 1)
            };
            let (c, map) = f.layer_complex(r0, keep);
            let rels: Vec<SparseVec> = (0..n1)
                .filter(|&i| {
                    let (w, x) = root_weight(i);
                    w == t && (!need_x || x >= 1)
                })
                .map(|i| f.merge(p.r1, i, r0).sub(ring, &f.map_kids(p.r1, i, r0, &|k| p.d1_kid(k, None))))
                .map(|v| v.remap(ring, |j| map[j].map(|x| x as usize)))
                .filter(|v| !v.is_empty())
                .collect();
            Ok((Quotient::new(&c, &rels)?, map))
        };
        let (cells, cmap) = piece(false)?;
        let (att, amap) = piece(true)?;
        // `id ⊗ i_*` is injective.
        let back: Vec<Option<u32>> = {
            let mut back = vec![None; amap.len()];
            for (r, a) in amap.iter().enumerate() {
                if let Some(a) = a {
                    back[*a as usize] = Some(r as u32);
                }
            }
            back
        };
        let mut red = Reducer::new(ring);
        for &k in &att.kept {
            let r = back[k as usize].unwrap();
            red.insert(&cells.project(&unit_or_zero(cmap[r as usize])));
        }
        if red.rank() != att.complex.len() {
            return Err(PushoutError::Internal(format!("id ⊗ i_* is not injective at t = {t}")));
        }
        let cd = dims_through(&cells.complex, dtot);
        let ad = dims_through(&att.complex, dtot);
        for (&d, &n) in &cd {
            *running.entry(d).or_default() += n;
        }
        for (&d, &n) in &ad {
            let e = running.get_mut(&d).unwrap();
            *e -= n;
        }
        running.retain(|_, n| *n > 0);
        out.stages.push(running.clone());
        out.cells.push(cd);
        out.attached.push(ad);
    }
    Ok(out)
}

/// Both computations; a disagreement is an error.
pub fn pushout(data: &PushoutData, dtot: i32) -> Result<Pushout, PushoutError> {
    let direct = pushout_direct(data, dtot)?;
    let filtered = pushout_filtered(data, dtot)?;
    let d = dims_through(&direct, dtot);
    let last = filtered.stages.last().cloned().unwrap_or_default();
    if d != last {
        return Err(PushoutError::Mismatch(format!("direct {d:?}, filtered {last:?}")));
    }
    Ok(Pushout { dtot, direct, filtered })
}

impl Pushout {
    pub fn dims(&self) -> BTreeMap<i32, usize> {
        dims_through(&self.direct, self.dtot)
    }
}

/// `{"format": "pushout", "algebra": …, "x": …, "y": …, "inclusion": [cells of Y], "f": [images in A]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PushoutFile {
    pub format: String,
    pub algebra: AlgebraFile,
    pub x: ChainComplex,
    pub y: ChainComplex,
    /// The cell of `Y` hit by each cell of `X`.
    pub inclusion: Vec<u32>,
    /// `f` on the cells of `X`, in the carrier of `A`.
    pub f: Vec<Vec<(u32, Scalar)>>,
}

impl PushoutFile {
    pub fn build(&self, cutoff: Option<usize>, budget: Option<i32>) -> Result<PushoutData, PushoutError> {
        if self.format != "pushout" {
            return Err(PushoutError::Invalid(format!("expected format \"pushout\", found {:?}", self.format)));
        }
        let a = Arc::new(self.algebra.build(cutoff, budget).map_err(|e| PushoutError::Invalid(e.to_string()))?);
        let ring = a.ring();
        if self.x.ring != ring || self.y.ring != ring {
            return Err(PushoutError::Invalid("X, Y and A must share a ring".into()));
        }
        let n = |len: usize, what: &str| {
            if len != self.x.len() {
                Err(PushoutError::Invalid(format!("{len} {what} entries for {} cells of X", self.x.len())))
            } else {
                Ok(())
            }
        };
        n(self.inclusion.len(), "inclusion")?;
        n(self.f.len(), "f")?;
        let vec_of = |v: &[(u32, Scalar)], bound: usize| -> Result<SparseVec, PushoutError> {
            let mut terms = Vec::new();
            for (k, c) in v {
                if *k as usize >= bound {
                    return Err(PushoutError::Invalid(format!("index {k} out of range")));
                }
                terms.push((*k as usize, ring.try_normalize(c.clone()).map_err(|e| PushoutError::Invalid(e.to_string()))?));
            }
            Ok(SparseVec::from_terms(ring, terms))
        };
        let x = Arc::new(self.x.clone());
        let i_img = self.inclusion.iter().map(|&j| vec_of(&[(j, ring.one())], self.y.len())).collect::<Result<_, _>>()?;
        let i = ChainMap::new(x.clone(), Arc::new(self.y.clone()), i_img)?;
        let f_img = self.f.iter().map(|v| vec_of(v, a.carrier.len())).collect::<Result<_, _>>()?;
        let f = ChainMap::new(x, Arc::new(a.carrier.clone()), f_img)?;
        PushoutData::new(a, f, i)
    }

    pub fn from_data(d: &PushoutData) -> Self {
        let entries = |v: &SparseVec| v.iter().map(|(k, c)| (k as u32, c.clone())).collect();
        PushoutFile {
            format: "pushout".into(),
            algebra: AlgebraFile::from_algebra(&d.algebra),
            x: (*d.i.source).clone(),
            y: (*d.i.target).clone(),
            inclusion: cell_inclusion(&d.i).expect("validated"),
            f: (0..d.f.source.len()).map(|c| entries(&d.f.apply(&SparseVec::unit(c)))).collect(),
        }
    }
}

#[cfg(test)]
mod tests;
