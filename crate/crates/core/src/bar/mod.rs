//! Simplicial bar constructions `Bar(N, O, X)` with `N` an arity band of
//! `O` viewed as a right module, and their normalized realizations.
//!
//! Level `p` is `N ∘ O^{∘p} ∘ X`, stored as root layer `R_p` over the
//! layers `L_p → ⋯ → L_1 → L_0 = X` of one forest. Face `d_0` composes the
//! root with the top `O`, `d_i` composes levels `i` and `i + 1` and `d_p`
//! applies the action of `X`. Degeneracies insert a layer of units. A tree
//! is degenerate exactly when one of its `O` levels consists of units.

pub mod derived;

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::algebra::{Action, Algebra, AlgebraError};
use crate::chain::{ChainBuilder, ChainComplex};
use crate::exactalg::{kernel, rank_of, Accumulator, CoeffRing, Insert, Reducer, SparseMatrix, SparseVec};
use crate::forest::{Filter, Forest, ForestError, LayerSpec, Node};
use crate::operad::OperadError;

#[derive(Debug, thiserror::Error)]
pub enum BarError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Policy(String),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Operad(#[from] OperadError),
    #[error(transparent)]
    Chain(#[from] crate::chain::ChainError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BarOptions {
    /// Highest simplicial level built.
    pub levels: usize,
    /// Highest total degree kept.
    pub dtot: i32,
    /// Every layer gets the full degree budget, so degeneracies stay inside.
    pub uniform: bool,
    /// Arity band of the root layers.
    pub roots: (usize, usize),
}

impl BarOptions {
    pub fn new(levels: usize, dtot: i32) -> Self {
        BarOptions { levels, dtot, uniform: false, roots: (1, usize::MAX) }
    }

    pub fn uniform(mut self) -> Self {
        self.uniform = true;
        self
    }

    pub fn roots(mut self, lo: usize, hi: usize) -> Self {
        self.roots = (lo, hi);
        self
    }
}

/// Upgrades an algebra so that the bar construction through total degree
/// `dtot` is complete: the operad cutoff and a free algebra's degree budget
/// must reach `dtot`.
pub fn prepare(x: &Arc<Algebra>, dtot: i32) -> Result<Arc<Algebra>, BarError> {
    let need = dtot.max(1) as usize;
    let mut out = x.clone();
    if !x.operad.is_truncated() && x.operad.cutoff() < need {
        let o = x.operad.with_cutoff(need)?;
        out = Arc::new(x.over(&o)?);
    }
    if let Action::Free { forest, layer } = &out.action {
        if forest.layer(*layer).spec.budget < dtot {
            let leaves = forest.leaves.clone();
            out = Arc::new(Algebra::free(&out.operad, &leaves, dtot)?.named(&x.name));
        }
    }
    Ok(out)
}

type Table = OnceLock<Vec<SparseVec>>;

pub struct Bar {
    pub algebra: Arc<Algebra>,
    pub forest: Forest,
    pub opts: BarOptions,
    l: Vec<usize>,
    r: Vec<usize>,
    /// `phi[j][m]`: `L_j → L_{j−1}` composing the levels `m` and `m + 1` below a node.
    phi: Vec<Vec<Table>>,
    /// `sigma[j][m]`: `L_j → L_{j+1}` inserting units `m` levels below a node.
    sigma: Vec<Vec<Table>>,
    /// `tau[j]`: `L_j → L_{j+1}` splitting free generators off the leaves.
    tau: Vec<Table>,
}

fn tables(n: usize, inner: impl Fn(usize) -> usize) -> Vec<Vec<Table>> {
    (0..n).map(|j| (0..inner(j)).map(|_| OnceLock::new()).collect()).collect()
}

impl Bar {
    pub fn new(x: &Arc<Algebra>, opts: BarOptions) -> Result<Bar, BarError> {
        let o = &x.operad;
        if !o.is_reduced() {
            return Err(BarError::Invalid("the bar construction needs a reduced operad".into()));
        }
        if !o.is_truncated() && (o.cutoff() as i32) < opts.dtot {
            return Err(BarError::Operad(OperadError::Cutoff { have: o.cutoff(), need: opts.dtot as usize }));
        }
        if let Action::Free { forest, layer } = &x.action {
            if forest.layer(*layer).spec.budget < opts.dtot {
                return Err(BarError::Invalid(format!(
                    "free algebra computed through degree {} but degree {} is needed",
                    forest.layer(*layer).spec.budget,
                    opts.dtot
                )));
            }
        }
        if let Some(c) = (0..x.carrier.len()).find(|&c| x.carrier.degree(c) <= 0) {
            return Err(BarError::Invalid(format!(
                "carrier cell {} sits in degree {}; carriers must be concentrated in degrees ≥ 1",
                x.carrier.label(c),
                x.carrier.degree(c)
            )));
        }
        let rmax = o.cutoff();
        let budget = |p: usize| if opts.uniform { opts.dtot } else { opts.dtot - p as i32 };
        let mut forest = Forest::new(o, &x.carrier, &[]);
        let mut l = vec![0];
        for j in 1..=opts.levels {
            let id = forest.add_layer(l[j - 1], LayerSpec::band(1, rmax, budget(j)), &Filter::default())?;
            l.push(id);
        }
        let mut r = Vec::new();
        let band = (opts.roots.0.max(1), opts.roots.1.min(rmax));
        for p in 0..=opts.levels {
            r.push(forest.add_layer(l[p], LayerSpec::band(band.0, band.1, budget(p)), &Filter::default())?);
        }
        let n = opts.levels + 1;
        Ok(Bar {
            algebra: x.clone(),
            forest,
            opts,
            l,
            r,
            phi: tables(n, |j| j),
            sigma: tables(n, |j| j + 1),
            tau: (0..n).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn ring(&self) -> CoeffRing {
        self.forest.ring
    }

    pub fn levels(&self) -> usize {
        self.opts.levels
    }

    /// Forest layer holding the roots of level `p`.
    pub fn root_layer(&self, p: usize) -> usize {
        self.r[p]
    }

    /// Images of the cells of `from` (a realization of `src`) in `to` (one of
    /// `self`) under the map induced by `leaf` on carriers.
    pub fn map_realized(&self, src: &Bar, from: &Realized, to: &Realized, leaf: &dyn Fn(u32) -> SparseVec) -> Vec<SparseVec> {
        let ring = self.ring();
        from.cells
            .iter()
            .map(|&(p, i)| {
                let v = self.forest.embed(&src.forest, src.r[p], i, self.r[p], leaf);
                v.remap(ring, |j| to.index.get(&(p, j as u32)).map(|&c| c as usize))
            })
            .collect()
    }

    pub fn level_len(&self, p: usize) -> usize {
        self.forest.layer(self.r[p]).len()
    }

    pub fn root(&self, p: usize, i: u32) -> &Node {
        self.forest.node(self.r[p], i)
    }

    pub fn root_label(&self, p: usize, i: u32) -> String {
        self.forest.label(self.r[p], i)
    }

    pub fn is_degenerate(&self, p: usize, i: u32) -> bool {
        p > 0 && (self.root(p, i).mask >> 1) & ((1u64 << p) - 1) != 0
    }

    fn phi(&self, j: usize, m: usize) -> &[SparseVec] {
        self.phi[j][m].get_or_init(|| {
            let f = &self.forest;
            let lj = self.l[j];
            (0..f.layer(lj).len() as u32)
                .map(|i| {
                    if m == 0 {
                        if j == 1 {
                            let n = f.node(lj, i);
                            self.algebra.act(n.op, &n.kids)
                        } else {
                            f.merge(lj, i, self.l[j - 1])
                        }
                    } else {
                        let below = self.phi(j - 1, m - 1);
                        f.map_kids(lj, i, self.l[j - 1], &|k| below[k as usize].clone())
                    }
                })
                .collect()
        })
    }

    fn sigma(&self, j: usize, m: usize) -> &[SparseVec] {
        self.sigma[j][m].get_or_init(|| {
            let f = &self.forest;
            let lj = self.l[j];
            let up = self.l[j + 1];
            let unit = f.operad.unit();
            (0..f.layer(lj).len() as u32)
                .map(|i| {
                    if m == 0 {
                        f.normal(up, unit, &[i]).map_or_else(SparseVec::new, |(k, s)| SparseVec::single(k as usize, self.ring().sign(s)))
                    } else {
                        let below = self.sigma(j - 1, m - 1);
                        f.map_kids(lj, i, up, &|k| below[k as usize].clone())
                    }
                })
                .collect()
        })
    }

    /// `d_i` from level `p` to level `p − 1`.
    pub fn face(&self, p: usize, i: usize, root: u32) -> SparseVec {
        assert!(p >= 1 && i <= p);
        let f = &self.forest;
        if i == 0 {
            f.merge(self.r[p], root, self.r[p - 1])
        } else {
            let t = self.phi(p, i - 1);
            f.map_kids(self.r[p], root, self.r[p - 1], &|k| t[k as usize].clone())
        }
    }

    /// `s_j` from level `p` to level `p + 1`.
    pub fn degeneracy(&self, p: usize, j: usize, root: u32) -> SparseVec {
        assert!(p < self.opts.levels && j <= p);
        let t = self.sigma(p, j);
        self.forest.map_kids(self.r[p], root, self.r[p + 1], &|k| t[k as usize].clone())
    }

    /// The extra degeneracy `s_{p+1}` of a bar construction on a free algebra.
    pub fn extra_degeneracy(&self, p: usize, root: u32) -> Option<SparseVec> {
        if p >= self.opts.levels {
            return None;
        }
        let Action::Free { forest: gf, layer: gl } = &self.algebra.action else { return None };
        let t = self.tau(p, gf, *gl);
        Some(self.forest.map_kids(self.r[p], root, self.r[p + 1], &|k| t[k as usize].clone()))
    }

    fn tau(&self, j: usize, gf: &Forest, gl: usize) -> &[SparseVec] {
        self.tau[j].get_or_init(|| {
            let f = &self.forest;
            let ring = self.ring();
            let lj = self.l[j];
            let up = self.l[j + 1];
            (0..f.layer(lj).len() as u32)
                .map(|i| {
                    if j == 0 {
                        let n = gf.node(gl, i);
                        let gens: Option<Vec<u32>> =
                            n.kids.iter().map(|&v| gf.normal(gl, gf.operad.unit(), &[v]).map(|(c, _)| c)).collect();
                        gens.and_then(|g| f.normal(up, n.op, &g))
                            .map_or_else(SparseVec::new, |(k, s)| SparseVec::single(k as usize, ring.sign(s)))
                    } else {
                        let below = self.tau(j - 1, gf, gl);
                        f.map_kids(lj, i, up, &|k| below[k as usize].clone())
                    }
                })
                .collect()
        })
    }

    fn in_band(&self, n: &Node, arity: (usize, usize)) -> bool {
        n.arity() >= arity.0 && n.arity() <= arity.1
    }

    /// Totalization of the normalized chains, restricted to roots of arity
    /// in `arity`; roots above the band must span a subcomplex.
    pub fn realize(&self, arity: (usize, usize)) -> Realized {
        let ring = self.ring();
        let mut cells = Vec::new();
        let mut index = HashMap::new();
        let mut b = ChainBuilder::new(ring);
        for p in 0..=self.opts.levels {
            for i in 0..self.level_len(p) as u32 {
                let n = self.root(p, i);
                if !self.in_band(n, arity) || self.is_degenerate(p, i) {
                    continue;
                }
                let deg = n.degree + p as i32;
                if deg > self.opts.dtot {
                    continue;
                }
                index.insert((p, i), cells.len() as u32);
                b.add_cell(format!("{}|{}", p, self.root_label(p, i)), deg);
                cells.push((p, i));
            }
        }
        for (c, &(p, i)) in cells.iter().enumerate() {
            let mut acc = Accumulator::new();
            for (k, v) in self.forest.layer(self.r[p]).dint[i as usize].iter() {
                if let Some(&j) = index.get(&(p, k as u32)) {
                    acc.add(ring, j as usize, v);
                }
            }
            if p > 0 {
                let e = self.root(p, i).degree;
                for fi in 0..=p {
                    let sg = ring.sign(if (e + fi as i32) % 2 == 0 { 1 } else { -1 });
                    for (k, v) in self.face(p, fi, i).iter() {
                        if let Some(&j) = index.get(&(p - 1, k as u32)) {
                            acc.add(ring, j as usize, &ring.mul(&sg, v));
                        }
                    }
                }
            }
            b.set_diff(c, acc.finish());
        }
        Realized {
            complex: b.build_unchecked(),
            cells,
            index,
            soundness: self.soundness(),
            arity,
        }
    }

    /// Degrees through which the realization agrees with the untruncated one.
    pub fn soundness(&self) -> i32 {
        (self.opts.dtot - 1).min(self.opts.levels as i32)
    }

    fn level_cells(&self, p: usize, e: i32, arity: (usize, usize)) -> Vec<u32> {
        (0..self.level_len(p) as u32).filter(|&i| self.root(p, i).degree == e && self.in_band(self.root(p, i), arity)).collect()
    }

    /// Totalization of the Moore complex `∩_{i≥1} ker d_i`, over a field.
    pub fn moore(&self, arity: (usize, usize)) -> Result<ChainComplex, BarError> {
        let ring = self.ring();
        ring.require_field().map_err(|e| BarError::Policy(e.to_string()))?;
        // Kernel bases per (p, e), as vectors over level p.
        let mut bases: HashMap<(usize, i32), Vec<SparseVec>> = HashMap::new();
        let mut solvers: HashMap<(usize, i32), Reducer> = HashMap::new();
        for p in 0..=self.opts.levels {
            let emax = self.opts.dtot - p as i32;
            for e in 1..=emax {
                let cs = self.level_cells(p, e, arity);
                let basis: Vec<SparseVec> = if p == 0 {
                    cs.iter().map(|&c| SparseVec::unit(c as usize)).collect()
                } else {
                    let width = self.level_len(p - 1);
                    let cols: Vec<SparseVec> = cs
                        .iter()
                        .map(|&c| {
                            let mut acc = Accumulator::new();
                            for i in 1..=p {
                                acc.add_vec(ring, &ring.one(), &self.face(p, i, c).remap(ring, |k| Some(k + (i - 1) * width)));
                            }
                            acc.finish()
                        })
                        .collect();
                    let m = SparseMatrix::from_columns(ring, width * p, cols);
                    kernel(&m)
                        .map_err(|e| BarError::Policy(e.to_string()))?
                        .into_iter()
                        .map(|v| v.remap(ring, |j| Some(cs[j] as usize)))
                        .collect()
                };
                let mut red = Reducer::tracking(ring);
                for v in &basis {
                    red.insert(v);
                }
                solvers.insert((p, e), red);
                bases.insert((p, e), basis);
            }
        }
        let mut keys: Vec<(usize, i32)> = bases.keys().copied().collect();
        keys.sort();
        let mut b = ChainBuilder::new(ring);
        let mut offset: HashMap<(usize, i32), usize> = HashMap::new();
        for &(p, e) in &keys {
            offset.insert((p, e), b.len());
            for k in 0..bases[&(p, e)].len() {
                b.add_cell(format!("m{p}.{e}.{k}"), e + p as i32);
            }
        }
        let dint = &self.forest.layers;
        for &(p, e) in &keys {
            for (k, v) in bases[&(p, e)].iter().enumerate() {
                let mut acc = Accumulator::new();
                let mut di = Accumulator::new();
                for (c, x) in v.iter() {
                    di.add_vec(ring, x, &dint[self.r[p]].dint[c]);
                }
                let di = di.finish();
                if !di.is_empty() {
                    let coords = solvers[&(p, e - 1)].solve(&di).ok_or_else(|| BarError::Invalid("Moore chains not closed under d".into()))?;
                    acc.add_vec(ring, &ring.one(), &coords.remap(ring, |j| Some(j + offset[&(p, e - 1)])));
                }
                if p > 0 {
                    let mut d0 = Accumulator::new();
                    for (c, x) in v.iter() {
                        d0.add_vec(ring, x, &self.face(p, 0, c as u32));
                    }
                    let mut d0 = d0.finish();
                    d0.retain(|j| self.in_band(self.root(p - 1, j as u32), arity));
                    if !d0.is_empty() {
                        let coords = solvers
                            .get(&(p - 1, e))
                            .and_then(|s| s.solve(&d0))
                            .ok_or_else(|| BarError::Invalid("d_0 leaves the Moore chains".into()))?;
                        let sg = ring.sign(if e % 2 == 0 { 1 } else { -1 });
                        acc.add_vec(ring, &sg, &coords.remap(ring, |j| Some(j + offset[&(p - 1, e)])));
                    }
                }
                b.set_diff(offset[&(p, e)] + k, acc.finish());
            }
        }
        Ok(b.build_unchecked())
    }

    /// Checks every simplicial identity on every stored basis element.
    pub fn check_identities(&self) -> Result<u64, String> {
        if !self.opts.uniform {
            return Err("simplicial identities need a uniform degree budget".into());
        }
        let ring = self.ring();
        let mut checked = 0u64;
        let lin = |f: &dyn Fn(u32) -> SparseVec, v: &SparseVec| {
            let mut acc = Accumulator::new();
            for (k, c) in v.iter() {
                acc.add_vec(ring, c, &f(k as u32));
            }
            acc.finish()
        };
        let top = self.opts.levels;
        for p in 0..=top {
            for x in 0..self.level_len(p) as u32 {
                let lab = || self.root_label(p, x);
                let e = SparseVec::unit(x as usize);
                let dint = |q: usize, v: &SparseVec| {
                    let mut acc = Accumulator::new();
                    for (k, c) in v.iter() {
                        acc.add_vec(ring, c, &self.forest.layer(self.r[q]).dint[k]);
                    }
                    acc.finish()
                };
                // Faces and degeneracies commute with the internal differential.
                if p >= 1 {
                    for i in 0..=p {
                        checked += 1;
                        if lin(&|k| self.face(p, i, k), &dint(p, &e)) != dint(p - 1, &self.face(p, i, x)) {
                            return Err(format!("d_{i} is not a chain map at level {p} on {}", lab()));
                        }
                    }
                }
                if p >= 2 {
                    for j in 1..=p {
                        for i in 0..j {
                            let lhs = lin(&|k| self.face(p - 1, i, k), &self.face(p, j, x));
                            let rhs = lin(&|k| self.face(p - 1, j - 1, k), &self.face(p, i, x));
                            checked += 1;
                            if lhs != rhs {
                                return Err(format!("d_{i} d_{j} ≠ d_{} d_{i} at level {p} on {}", j - 1, lab()));
                            }
                        }
                    }
                }
                if p < top {
                    for j in 0..=p {
                        let s = self.degeneracy(p, j, x);
                        for i in 0..=p + 1 {
                            let lhs = lin(&|k| self.face(p + 1, i, k), &s);
                            let rhs = if i == j || i == j + 1 {
                                e.clone()
                            } else if i < j {
                                lin(&|k| self.degeneracy(p - 1, j - 1, k), &self.face(p, i, x))
                            } else {
                                lin(&|k| self.degeneracy(p - 1, j, k), &self.face(p, i - 1, x))
                            };
                            checked += 1;
                            if lhs != rhs {
                                return Err(format!("d_{i} s_{j} fails at level {p} on {}", lab()));
                            }
                        }
                        if p + 1 < top {
                            for i in 0..=j {
                                let lhs = lin(&|k| self.degeneracy(p + 1, i, k), &s);
                                let rhs = lin(&|k| self.degeneracy(p + 1, j + 1, k), &self.degeneracy(p, i, x));
                                checked += 1;
                                if lhs != rhs {
                                    return Err(format!("s_{i} s_{j} ≠ s_{} s_{i} at level {p} on {}", j + 1, lab()));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(checked)
    }

    /// Checks that the extra degeneracy satisfies `d_{p+1} s = id` and
    /// `d_i s = s d_i` for `i ≤ p`.
    pub fn check_extra_degeneracy(&self) -> Result<u64, String> {
        if !self.opts.uniform {
            return Err("the extra degeneracy needs a uniform degree budget".into());
        }
        if !self.algebra.is_free() {
            return Err("the extra degeneracy needs a free algebra".into());
        }
        let ring = self.ring();
        let mut checked = 0;
        for p in 0..self.opts.levels {
            for x in 0..self.level_len(p) as u32 {
                let s = self.extra_degeneracy(p, x).unwrap();
                for i in (if p == 0 { 1 } else { 0 })..=p + 1 {
                    let mut lhs = Accumulator::new();
                    for (k, c) in s.iter() {
                        lhs.add_vec(ring, c, &self.face(p + 1, i, k as u32));
                    }
                    let rhs = if i == p + 1 {
                        SparseVec::unit(x as usize)
                    } else {
                        let mut acc = Accumulator::new();
                        for (k, c) in self.face(p, i, x).iter() {
                            acc.add_vec(ring, c, &self.extra_degeneracy(p - 1, k as u32).unwrap());
                        }
                        acc.finish()
                    };
                    checked += 1;
                    if lhs.finish() != rhs {
                        return Err(format!("extra degeneracy fails d_{i} at level {p} on {}", self.root_label(p, x)));
                    }
                }
            }
        }
        Ok(checked)
    }

    /// The degenerate part of level `n`, per internal degree, computed as the
    /// span of degeneracy images and as the colimit over the punctured cube.
    pub fn degenerate_subobject(&self, n: usize) -> Result<Vec<DegeneratePart>, String> {
        if !self.opts.uniform {
            return Err("degenerate subobjects need a uniform degree budget".into());
        }
        if n > self.opts.levels {
            return Err(format!("level {n} is not stored"));
        }
        let ring = self.ring();
        let all = (1, usize::MAX);
        let mut out = Vec::new();
        for e in 1..=self.opts.dtot {
            let marked = self.level_cells(n, e, all).into_iter().filter(|&i| self.is_degenerate(n, i)).count();
            let (span, colim) = if n == 0 {
                (0, 0)
            } else {
                let below = self.level_cells(n - 1, e, all);
                let mut images = Vec::new();
                for j in 0..n {
                    for &x in &below {
                        images.push(self.degeneracy(n - 1, j, x));
                    }
                }
                let span = rank_of(ring, &images);
                // ⊕_j (level n−1) modulo the pairwise relations from level n−2.
                let width = self.level_len(n - 1);
                let mut rels = Vec::new();
                if n >= 2 {
                    for &y in &self.level_cells(n - 2, e, all) {
                        for j in 1..n {
                            for i in 0..j {
                                let a = self.degeneracy(n - 2, j - 1, y).remap(ring, |k| Some(k + i * width));
                                let b = self.degeneracy(n - 2, i, y).remap(ring, |k| Some(k + j * width));
                                rels.push(a.sub(ring, &b));
                            }
                        }
                    }
                }
                let colim = n * below.len() - rank_of(ring, &rels);
                (span, colim)
            };
            if span != colim || span != marked {
                return Err(format!("degree {e}: degeneracy span {span}, cube colimit {colim}, degenerate trees {marked}"));
            }
            out.push(DegeneratePart { degree: e, dim: span });
        }
        Ok(out)
    }

    /// Per level: basis size, nondegenerate count and face ranks.
    pub fn summary(&self) -> Vec<LevelSummary> {
        let ring = self.ring();
        (0..=self.opts.levels)
            .map(|p| {
                let nondeg = (0..self.level_len(p) as u32).filter(|&i| !self.is_degenerate(p, i)).count();
                let face_ranks = if p == 0 {
                    Vec::new()
                } else {
                    (0..=p)
                        .map(|i| {
                            let cols: Vec<SparseVec> = (0..self.level_len(p) as u32).map(|x| self.face(p, i, x)).collect();
                            let mut red = Reducer::new(ring);
                            cols.iter().filter(|c| matches!(red.insert(c), Insert::Pivot(_))).count()
                        })
                        .collect()
                };
                LevelSummary { level: p, dim: self.level_len(p), nondegenerate: nondeg, face_ranks }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegeneratePart {
    pub degree: i32,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelSummary {
    pub level: usize,
    pub dim: usize,
    pub nondegenerate: usize,
    pub face_ranks: Vec<usize>,
}

/// A realized bar construction and its cells `(level, root)`.
#[derive(Clone, Debug)]
pub struct Realized {
    pub complex: ChainComplex,
    pub cells: Vec<(usize, u32)>,
    pub index: HashMap<(usize, u32), u32>,
    pub soundness: i32,
    pub arity: (usize, usize),
}

impl Realized {
    /// The cell-matching map to another realization of the same bar
    /// construction: the projection onto a smaller arity band, or the
    /// inclusion of a subcomplex.
    pub fn map_to(&self, other: &Realized) -> Vec<SparseVec> {
        self.cells
            .iter()
            .map(|c| other.index.get(c).map_or_else(SparseVec::new, |&j| SparseVec::unit(j as usize)))
            .collect()
    }
}

#[cfg(test)]
mod tests;
