//! Layered trees `O_band ∘ ⋯ ∘ O_band ∘ Y` over a complex of leaves, with
//! basis elements in normal form.
//!
//! A node is an operation of arity `t` with `t` children from the layer
//! below, sorted by id. Operations sit in degree 0, so a node has the total
//! degree of its children and degree-0 maps applied to children carry no
//! signs.

use std::collections::HashMap;

use crate::chain::{ChainBuilder, ChainComplex};
use crate::exactalg::{Accumulator, CoeffRing, SparseVec};
use crate::operad::{Op, Operad, OperadError};
use crate::symseq::{blocks_of, sort_items, Canon};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub op: Op,
    pub kids: Vec<u32>,
    pub degree: i32,
    /// Bit `m`: every operation `m` levels below the top of this node is the unit.
    pub mask: u64,
    /// Linear slots used below this node.
    pub lin: u32,
}

impl Node {
    pub fn arity(&self) -> usize {
        self.kids.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayerSpec {
    /// Allowed arities `[lo, hi]`.
    pub band: (usize, usize),
    /// Only the unit operation.
    pub unit_only: bool,
    /// Largest total degree kept.
    pub budget: i32,
}

impl LayerSpec {
    pub fn band(lo: usize, hi: usize, budget: i32) -> Self {
        LayerSpec { band: (lo, hi), unit_only: false, budget }
    }

    pub fn units(budget: i32) -> Self {
        LayerSpec { band: (1, 1), unit_only: true, budget }
    }
}

#[derive(Clone, Debug)]
pub struct Layer {
    /// `None` for the leaves.
    pub below: Option<usize>,
    pub spec: LayerSpec,
    pub nodes: Vec<Node>,
    index: HashMap<(u32, Vec<u32>), u32>,
    /// Internal differential.
    pub dint: Vec<SparseVec>,
}

impl Layer {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn find(&self, op: Op, kids: &[u32]) -> Option<u32> {
        self.index.get(&(op.1, kids.to_vec())).copied().filter(|&i| self.nodes[i as usize].op.0 == op.0)
    }
}

/// Restrictions applied while enumerating a layer.
#[derive(Default)]
pub struct Filter<'a> {
    /// Children allowed at all.
    pub kid: Option<&'a dyn Fn(u32) -> bool>,
    /// Accepted sorted child lists.
    pub kids: Option<&'a dyn Fn(&[u32]) -> bool>,
    /// Accepted operations over a sorted child list.
    pub op: Option<&'a dyn Fn(Op, &[u32]) -> bool>,
}

#[derive(Clone, Debug)]
pub struct Forest {
    pub ring: CoeffRing,
    pub operad: Operad,
    pub leaves: ChainComplex,
    pub layers: Vec<Layer>,
}

#[derive(Debug, thiserror::Error)]
pub enum ForestError {
    #[error("leaf {0} sits in degree ≤ 0; trees over it are unbounded")]
    Unbounded(String),
    #[error("arity {need} exceeds the operad cutoff {have}")]
    Cutoff { need: usize, have: usize },
    #[error(transparent)]
    Operad(#[from] OperadError),
}

impl Forest {
    /// `slots[i]` marks leaf `i` as a linear input: used at most once per tree.
    pub fn new(operad: &Operad, leaves: &ChainComplex, slots: &[usize]) -> Self {
        let ring = operad.ring;
        let mut lin = vec![0u32; leaves.len()];
        for (k, &s) in slots.iter().enumerate() {
            lin[s] = 1 << k;
        }
        let nodes: Vec<Node> = (0..leaves.len())
            .map(|i| Node { op: (0, i as u32), kids: Vec::new(), degree: leaves.degree(i), mask: !0, lin: lin[i] })
            .collect();
        let index = nodes.iter().enumerate().map(|(i, n)| ((n.op.1, Vec::new()), i as u32)).collect();
        let budget = leaves.max_degree().unwrap_or(0);
        let layer = Layer {
            below: None,
            spec: LayerSpec::band(0, 0, budget),
            nodes,
            index,
            dint: leaves.diffs().to_vec(),
        };
        Forest { ring, operad: operad.clone(), leaves: leaves.clone(), layers: vec![layer] }
    }

    pub fn layer(&self, l: usize) -> &Layer {
        &self.layers[l]
    }

    pub fn node(&self, l: usize, i: u32) -> &Node {
        &self.layers[l].nodes[i as usize]
    }

    fn parity(&self, l: usize, i: u32) -> bool {
        self.layers[l].nodes[i as usize].degree.rem_euclid(2) == 1
    }

    /// The normal form of `(op; kids)` in layer `l`, or `None` when it
    /// vanishes or lies outside the layer.
    pub fn normal(&self, l: usize, op: Op, kids: &[u32]) -> Option<(u32, i8)> {
        let layer = &self.layers[l];
        let below = layer.below?;
        let t = kids.len();
        if t < layer.spec.band.0 || t > layer.spec.band.1 || op.0 != t {
            return None;
        }
        let mut items: Vec<(u32, bool)> = kids.iter().map(|&k| (k, self.parity(below, k))).collect();
        let (a, sign) = sort_items(&self.operad, t, op.1, &mut items);
        let blocks = blocks_of(&items);
        let (a, sign) = if blocks.is_empty() {
            (a, sign)
        } else {
            match self.operad.canon().table(&self.operad, t, blocks).canon[a as usize].times(sign) {
                Canon::Term(b, s) => (b, s),
                Canon::Zero => return None,
            }
        };
        let sorted: Vec<u32> = items.into_iter().map(|(k, _)| k).collect();
        layer.index.get(&(a, sorted)).map(|&i| (i, sign))
    }

    /// Adds a layer over `below` and returns its id.
    pub fn add_layer(&mut self, below: usize, spec: LayerSpec, filter: &Filter) -> Result<usize, ForestError> {
        let bl = &self.layers[below];
        let cands: Vec<u32> = (0..bl.len() as u32)
            .filter(|&i| bl.nodes[i as usize].degree <= spec.budget && filter.kid.map_or(true, |f| f(i)))
            .collect();
        for &c in &cands {
            let n = &bl.nodes[c as usize];
            if n.degree <= 0 && n.lin == 0 {
                return Err(ForestError::Unbounded(self.label(below, c)));
            }
        }
        let mut nodes: Vec<Node> = Vec::new();
        let mut index: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
        let mut kids: Vec<u32> = Vec::new();
        let operad = &self.operad;
        let mut overflow = 0usize;
        let mut emit = |kids: &[u32], nodes: &mut Vec<Node>| {
            let t = kids.len();
            if t < spec.band.0 || t > spec.band.1 {
                return;
            }
            if t > operad.cutoff() {
                if !spec.unit_only && !operad.is_truncated() {
                    overflow = overflow.max(t);
                }
                return;
            }
            if operad.dim(t) == 0 {
                return;
            }
            if filter.kids.map_or(false, |f| !f(kids)) {
                return;
            }
            let items: Vec<(u32, bool)> = kids.iter().map(|&k| (k, bl.nodes[k as usize].degree.rem_euclid(2) == 1)).collect();
            let blocks = blocks_of(&items);
            let reps: Vec<u32> = if spec.unit_only {
                if t != 1 {
                    return;
                }
                vec![0]
            } else if blocks.is_empty() {
                (0..operad.dim(t) as u32).collect()
            } else {
                operad.canon().table(operad, t, blocks).reps.clone()
            };
            let degree = kids.iter().map(|&k| bl.nodes[k as usize].degree).sum();
            let lin = kids.iter().fold(0, |m, &k| m | bl.nodes[k as usize].lin);
            let and = kids.iter().fold(!0u64, |m, &k| m & bl.nodes[k as usize].mask);
            for x in reps {
                let op = (t, x);
                if filter.op.map_or(false, |f| !f(op, kids)) {
                    continue;
                }
                let mask = (and << 1) | operad.is_unit(op) as u64;
                index.insert((x, kids.to_vec()), nodes.len() as u32);
                nodes.push(Node { op, kids: kids.to_vec(), degree, mask, lin });
            }
        };
        fn dfs(
            bl: &Layer,
            cands: &[u32],
            start: usize,
            kids: &mut Vec<u32>,
            deg: i32,
            lin: u32,
            spec: &LayerSpec,
            nodes: &mut Vec<Node>,
            emit: &mut dyn FnMut(&[u32], &mut Vec<Node>),
        ) {
            emit(kids, nodes);
            if kids.len() >= spec.band.1 {
                return;
            }
            for ci in start..cands.len() {
                let c = cands[ci];
                let n = &bl.nodes[c as usize];
                if deg + n.degree > spec.budget || lin & n.lin != 0 {
                    continue;
                }
                kids.push(c);
                dfs(bl, cands, ci, kids, deg + n.degree, lin | n.lin, spec, nodes, emit);
                kids.pop();
            }
        }
        dfs(bl, &cands, 0, &mut kids, 0, 0, &spec, &mut nodes, &mut emit);
        if overflow > 0 {
            return Err(ForestError::Cutoff { need: overflow, have: self.operad.cutoff() });
        }
        let layer = Layer { below: Some(below), spec, nodes, index, dint: Vec::new() };
        self.layers.push(layer);
        let l = self.layers.len() - 1;
        let dint = (0..self.layers[l].len() as u32).map(|i| self.internal_diff(l, i)).collect();
        self.layers[l].dint = dint;
        Ok(l)
    }

    fn internal_diff(&self, l: usize, i: u32) -> SparseVec {
        let ring = self.ring;
        let layer = &self.layers[l];
        let below = layer.below.unwrap();
        let node = &layer.nodes[i as usize];
        let mut acc = Accumulator::new();
        let mut pre = 0;
        for (pos, &k) in node.kids.iter().enumerate() {
            let sg: i8 = if pre % 2 == 0 { 1 } else { -1 };
            for (k2, c) in self.layers[below].dint[k as usize].iter() {
                let mut kids = node.kids.clone();
                kids[pos] = k2 as u32;
                if let Some((j, s)) = self.normal(l, node.op, &kids) {
                    acc.add(ring, j as usize, &ring.mul(c, &ring.sign(sg * s)));
                }
            }
            pre += self.layers[below].nodes[k as usize].degree;
        }
        acc.finish()
    }

    /// Replaces each child by its image under a degree-0 map into the layer
    /// below `target`, expanding multilinearly.
    pub fn map_kids(&self, l: usize, i: u32, target: usize, f: &dyn Fn(u32) -> SparseVec) -> SparseVec {
        let ring = self.ring;
        let node = &self.layers[l].nodes[i as usize];
        let images: Vec<SparseVec> = node.kids.iter().map(|&k| f(k)).collect();
        if images.iter().any(|v| v.is_empty()) {
            return SparseVec::new();
        }
        let mut acc = Accumulator::new();
        let mut choice = vec![0usize; images.len()];
        let mut kids = vec![0u32; images.len()];
        loop {
            let mut coef = ring.one();
            for (p, &c) in choice.iter().enumerate() {
                let (k, s) = &images[p].entries()[c];
                kids[p] = *k;
                coef = ring.mul(&coef, s);
            }
            if let Some((j, s)) = self.normal(target, node.op, &kids) {
                acc.add(ring, j as usize, &ring.mul(&coef, &ring.sign(s)));
            }
            let mut p = images.len();
            loop {
                if p == 0 {
                    return acc.finish();
                }
                p -= 1;
                choice[p] += 1;
                if choice[p] < images[p].len() {
                    break;
                }
                choice[p] = 0;
            }
        }
    }

    /// Composes a node with its children: `(x; (y_1; g…), …) ↦ (γ(x; y); g…)`
    /// in layer `target`, which must sit over the grandchildren's layer.
    pub fn merge(&self, l: usize, i: u32, target: usize) -> SparseVec {
        let node = &self.layers[l].nodes[i as usize];
        self.compose(node.op, self.layers[l].below.unwrap(), &node.kids, target)
    }

    /// `(x; kids)` with `kids` nodes of layer `kl`, composed into `target`.
    pub fn compose(&self, x: Op, kl: usize, kids: &[u32], target: usize) -> SparseVec {
        let ring = self.ring;
        let mut ys = Vec::with_capacity(kids.len());
        let mut grand = Vec::new();
        for &k in kids {
            let kn = &self.layers[kl].nodes[k as usize];
            ys.push(kn.op);
            grand.extend_from_slice(&kn.kids);
        }
        let total = grand.len();
        let spec = self.layers[target].spec;
        if total < spec.band.0 || total > spec.band.1 {
            return SparseVec::new();
        }
        if total > self.operad.cutoff() && !self.operad.is_truncated() {
            return SparseVec::new();
        }
        let composite = self.operad.gamma(x, &ys);
        let mut acc = Accumulator::new();
        for (z, c) in composite.iter() {
            if let Some((j, s)) = self.normal(target, (total, z as u32), &grand) {
                acc.add(ring, j as usize, &ring.mul(c, &ring.sign(s)));
            }
        }
        acc.finish()
    }

    /// A readable label for a node.
    pub fn label(&self, l: usize, i: u32) -> String {
        let layer = &self.layers[l];
        let node = &layer.nodes[i as usize];
        match layer.below {
            None => self.leaves.label(i as usize).to_string(),
            Some(b) => {
                let kids: Vec<String> = node.kids.iter().map(|&k| self.label(b, k)).collect();
                let op = if self.operad.is_unit(node.op) { "1".to_string() } else { self.operad.label(node.op).to_string() };
                format!("{op}({})", kids.join(","))
            }
        }
    }

    /// The layer as a chain complex with its internal differential.
    pub fn layer_complex(&self, l: usize, keep: impl Fn(&Node) -> bool) -> (ChainComplex, Vec<Option<u32>>) {
        let layer = &self.layers[l];
        let mut b = ChainBuilder::new(self.ring);
        let mut map = vec![None; layer.len()];
        for (i, n) in layer.nodes.iter().enumerate() {
            if keep(n) {
                map[i] = Some(b.add_cell(self.label(l, i as u32), n.degree) as u32);
            }
        }
        for i in 0..layer.len() {
            if let Some(j) = map[i] {
                let d = layer.dint[i].remap(self.ring, |k| map[k].map(|x| x as usize));
                b.set_diff(j as usize, d);
            }
        }
        (b.build_unchecked(), map)
    }

    /// Re-expresses a node of another forest over the same operad in this one,
    /// mapping leaves through `leaf`.
    pub fn embed(&self, src: &Forest, sl: usize, i: u32, tl: usize, leaf: &dyn Fn(u32) -> SparseVec) -> SparseVec {
        let ring = self.ring;
        match src.layers[sl].below {
            None => leaf(i),
            Some(sb) => {
                let Some(tb) = self.layers[tl].below else { return SparseVec::new() };
                let node = &src.layers[sl].nodes[i as usize];
                let images: Vec<SparseVec> = node.kids.iter().map(|&k| self.embed(src, sb, k, tb, leaf)).collect();
                if images.iter().any(|v| v.is_empty()) {
                    return SparseVec::new();
                }
                let mut acc = Accumulator::new();
                let mut choice = vec![0usize; images.len()];
                let mut kids = vec![0u32; images.len()];
                loop {
                    let mut coef = ring.one();
                    for (p, &c) in choice.iter().enumerate() {
                        let (k, s) = &images[p].entries()[c];
                        kids[p] = *k;
                        coef = ring.mul(&coef, s);
                    }
                    if let Some((j, s)) = self.normal(tl, node.op, &kids) {
                        acc.add(ring, j as usize, &ring.mul(&coef, &ring.sign(s)));
                    }
                    let mut p = images.len();
                    loop {
                        if p == 0 {
                            return acc.finish();
                        }
                        p -= 1;
                        choice[p] += 1;
                        if choice[p] < images[p].len() {
                            break;
                        }
                        choice[p] = 0;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::homology;

    const Q: CoeffRing = CoeffRing::Rationals;

    fn gens(degs: &[i32]) -> ChainComplex {
        let mut b = ChainBuilder::new(Q);
        for (i, &d) in degs.iter().enumerate() {
            b.add_cell(format!("v{i}"), d);
        }
        b.build().unwrap()
    }

    #[test]
    fn free_algebra_dimensions() {
        // As on an odd generator: one word per length.
        let o = Operad::assoc(Q, 6);
        let mut f = Forest::new(&o, &gens(&[1]), &[]);
        let l = f.add_layer(0, LayerSpec::band(1, 6, 6), &Filter::default()).unwrap();
        let (c, _) = f.layer_complex(l, |_| true);
        assert_eq!(c.dims().into_iter().collect::<Vec<_>>(), (1..=6).map(|d| (d, 1)).collect::<Vec<_>>());
        // Com on two odd generators: an exterior algebra minus the unit.
        let c2 = Operad::comm(Q, 4).unwrap();
        let mut f2 = Forest::new(&c2, &gens(&[1, 1]), &[]);
        let l2 = f2.add_layer(0, LayerSpec::band(1, 4, 4), &Filter::default()).unwrap();
        assert_eq!(f2.layer(l2).len(), 3);
    }

    #[test]
    fn sym_of_acyclic_is_acyclic() {
        let mut b = ChainBuilder::new(Q);
        let y = b.add_cell("y", 2);
        let x = b.add_cell("x", 1);
        b.set_diff(y, SparseVec::unit(x));
        let v = b.build().unwrap();
        for o in [Operad::comm(Q, 6).unwrap(), Operad::assoc(Q, 6)] {
            let mut f = Forest::new(&o, &v, &[]);
            let l = f.add_layer(0, LayerSpec::band(1, 6, 6), &Filter::default()).unwrap();
            let (c, _) = f.layer_complex(l, |_| true);
            c.validate().unwrap();
            // The top degree is cut off by the budget.
            assert!(homology(&c).window(0, 5).is_zero(), "{}", o.name);
        }
    }

    #[test]
    fn merge_is_composition() {
        let o = Operad::assoc(Q, 4);
        let mut f = Forest::new(&o, &gens(&[1, 1]), &[]);
        let l1 = f.add_layer(0, LayerSpec::band(1, 4, 4), &Filter::default()).unwrap();
        let l2 = f.add_layer(l1, LayerSpec::band(1, 4, 4), &Filter::default()).unwrap();
        // Every node in l2 merges to a signed basis element of l1.
        for i in 0..f.layer(l2).len() as u32 {
            let v = f.merge(l2, i, l1);
            assert!(v.len() <= 1);
            if f.node(l2, i).mask & 1 == 1 {
                let kid = f.node(l2, i).kids[0];
                assert_eq!(v, SparseVec::unit(kid as usize));
            }
        }
    }

    #[test]
    fn linear_slots_used_once() {
        let o = Operad::comm(Q, 4).unwrap();
        let leaves = gens(&[1, 0, 0]);
        let mut f = Forest::new(&o, &leaves, &[1, 2]);
        let all = |k: &[u32]| k.contains(&1) && k.contains(&2);
        let l = f.add_layer(0, LayerSpec::band(1, 4, 2), &Filter { kids: Some(&all), ..Filter::default() }).unwrap();
        // c(u1,u2), c(v,u1,u2), c(v,v,u1,u2)=0 since v is odd.
        assert_eq!(f.layer(l).len(), 2);
    }
}
