//! Operads in degree 0: the associative and commutative presets, free
//! operads, tabulated operads and their truncations.

pub mod axioms;
pub mod free;
pub mod source;
pub mod table;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::chain::{ChainBuilder, ChainComplex};
use crate::exactalg::{CoeffRing, Scalar, SparseVec};
use crate::symseq::{perm, Canonicalizer, GeneratorAction, Level, SymSeq, SymSeqError};

pub use axioms::{check_operad_axioms, AxiomReport};
pub use free::{FreeOperad, Tree};
pub use table::CompositionTable;

#[derive(Debug, thiserror::Error)]
pub enum OperadError {
    #[error("{0}")]
    Policy(String),
    #[error("{0}")]
    Invalid(String),
    #[error("arity cutoff {have} is below the required {need}")]
    Cutoff { have: usize, need: usize },
    #[error(transparent)]
    SymSeq(#[from] SymSeqError),
    #[error(transparent)]
    Chain(#[from] crate::chain::ChainError),
}

/// A basis element `(arity, index)`.
pub type Op = (usize, u32);

#[derive(Clone, Debug)]
pub enum Rule {
    Assoc,
    Comm,
    Free(Arc<FreeOperad>),
    Table(Arc<CompositionTable>),
}

#[derive(Clone, Debug)]
pub struct Operad {
    pub name: String,
    pub ring: CoeffRing,
    seq: SymSeq,
    rule: Rule,
    /// Compositions above the cutoff vanish (a truncation quotient).
    truncated: bool,
    pub experimental: bool,
    canon: Arc<Canonicalizer>,
}

impl GeneratorAction for Operad {
    fn level_len(&self, t: usize) -> usize {
        self.seq.dim(t)
    }

    fn act(&self, t: usize, i: usize, a: u32) -> (u32, i8) {
        self.seq.act(t, i, a)
    }
}

fn canon_for(ring: CoeffRing) -> Arc<Canonicalizer> {
    Arc::new(Canonicalizer::new(ring.signs_matter()))
}

fn word_label(w: &[usize]) -> String {
    let l: Vec<String> = w.iter().map(|x| format!("x{}", x + 1)).collect();
    l.join("")
}

impl Operad {
    /// Non-unital associative: `As[r] = 𝒦[Σ_r]`, basis the words in rank order.
    pub fn assoc(ring: CoeffRing, cutoff: usize) -> Self {
        let mut seq = SymSeq::zero(ring, cutoff);
        for r in 1..=cutoff {
            let mut l = SymSeq::regular_level(ring, r);
            let mut b = ChainBuilder::new(ring);
            for w in perm::all(r) {
                b.add_cell(word_label(&w), 0);
            }
            l.complex = b.build_unchecked();
            seq.insert_level(r, l).expect("regular representation");
        }
        Operad { name: "assocNonunital".into(), ring, seq, rule: Rule::Assoc, truncated: false, experimental: false, canon: canon_for(ring) }
    }

    /// Non-unital commutative: `Com[r] = 𝒦` with trivial action.
    pub fn comm(ring: CoeffRing, cutoff: usize) -> Result<Self, OperadError> {
        let experimental = match ring {
            CoeffRing::Rationals => false,
            CoeffRing::PrimeField(p) if p as usize > cutoff => true,
            _ => {
                return Err(OperadError::Policy(format!(
                    "the commutative operad needs Q or a prime field above the cutoff {cutoff}, got {ring}"
                )))
            }
        };
        let mut seq = SymSeq::zero(ring, cutoff);
        for r in 1..=cutoff {
            let mut b = ChainBuilder::new(ring);
            b.add_cell(format!("c{r}"), 0);
            seq.insert_level(r, Level::trivial(b.build_unchecked(), r)).expect("trivial representation");
        }
        Ok(Operad { name: "comNonunital".into(), ring, seq, rule: Rule::Comm, truncated: false, experimental, canon: canon_for(ring) })
    }

    pub fn free(gens: &SymSeq, cutoff: usize) -> Result<Self, OperadError> {
        let f = FreeOperad::new(gens, cutoff)?;
        let seq = f.seq(gens.ring);
        Ok(Operad { name: "free".into(), ring: gens.ring, seq, rule: Rule::Free(Arc::new(f)), truncated: false, experimental: false, canon: canon_for(gens.ring) })
    }

    pub fn from_table(name: impl Into<String>, table: CompositionTable) -> Result<Self, OperadError> {
        let seq = table.seq.clone();
        let seq_ring = seq.ring;
        if seq.dim(1) == 0 {
            return Err(OperadError::Invalid("a tabulated operad needs a unit in arity 1".into()));
        }
        for (r, l) in seq.levels() {
            if l.complex.support().any(|d| d != 0) || l.complex.diffs().iter().any(|d| !d.is_empty()) {
                return Err(OperadError::Invalid(format!("operad level {r} must sit in degree 0 with zero differential")));
            }
        }
        Ok(Operad {
            name: name.into(),
            ring: seq.ring,
            seq,
            rule: Rule::Table(Arc::new(table)),
            truncated: false,
            experimental: false,
            canon: canon_for(seq_ring),
        })
    }

    /// Orbit tables for normal forms of `O[t] ⊗_{Σ_t} (…)`.
    pub fn canon(&self) -> &Canonicalizer {
        &self.canon
    }

    pub fn seq(&self) -> &SymSeq {
        &self.seq
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn cutoff(&self) -> usize {
        self.seq.cutoff
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn dim(&self, r: usize) -> usize {
        self.seq.dim(r)
    }

    pub fn label(&self, op: Op) -> &str {
        self.seq.level(op.0).unwrap().complex.label(op.1 as usize)
    }

    pub fn unit(&self) -> Op {
        (1, 0)
    }

    pub fn is_unit(&self, op: Op) -> bool {
        op == (1, 0)
    }

    pub fn is_reduced(&self) -> bool {
        self.seq.dim(0) == 0
    }

    /// `O[1] = I[1]`.
    pub fn is_unitary1(&self) -> bool {
        self.seq.dim(1) == 1
    }

    pub fn is_sigma_free(&self) -> bool {
        match self.rule {
            Rule::Assoc => true,
            Rule::Comm => self.cutoff() <= 1,
            _ => self.seq.is_sigma_free(),
        }
    }

    /// The same rule with a different cutoff; tabulated operads cannot grow.
    pub fn with_cutoff(&self, cutoff: usize) -> Result<Operad, OperadError> {
        if cutoff == self.cutoff() {
            return Ok(self.clone());
        }
        if self.truncated && cutoff > self.cutoff() {
            return Ok(self.clone());
        }
        let mut o = match &self.rule {
            Rule::Assoc => Operad::assoc(self.ring, cutoff),
            Rule::Comm => Operad::comm(self.ring, cutoff)?,
            Rule::Free(f) => Operad::free(&f.gens, cutoff)?,
            Rule::Table(_) => {
                if cutoff > self.cutoff() {
                    return Err(OperadError::Cutoff { have: self.cutoff(), need: cutoff });
                }
                let mut o = self.clone();
                o.seq = o.seq.truncate(cutoff.max(1))?;
                o.seq.cutoff = cutoff;
                o
            }
        };
        o.name = self.name.clone();
        Ok(o)
    }

    /// The quotient operad `τ_k O` in which compositions above arity `k` vanish.
    pub fn truncation(&self, k: usize) -> Result<Operad, OperadError> {
        if k == 0 {
            return Err(OperadError::Invalid("truncation τ_k needs k ≥ 1".into()));
        }
        if !self.is_reduced() {
            return Err(OperadError::Invalid("truncation needs a reduced operad (O[0] = 0)".into()));
        }
        let mut o = if k <= self.cutoff() { self.clone() } else { self.with_cutoff(k)? };
        o.seq = o.seq.truncate(k)?;
        o.seq.cutoff = k;
        o.truncated = true;
        o.name = format!("tau{k}({})", self.name);
        Ok(o)
    }

    pub fn act_perm(&self, op: Op, sigma: &[usize]) -> (u32, i8) {
        self.seq.level(op.0).unwrap().act_perm(op.1, sigma)
    }

    /// `γ(x; y_1, …, y_t)` in block order.
    pub fn gamma(&self, x: Op, ys: &[Op]) -> SparseVec {
        debug_assert_eq!(x.0, ys.len());
        let total: usize = ys.iter().map(|y| y.0).sum();
        if self.dim(x.0) == 0 || ys.iter().any(|y| self.dim(y.0) == 0) {
            return SparseVec::new();
        }
        if total > self.cutoff() {
            if self.truncated {
                return SparseVec::new();
            }
            panic!("composition into arity {total} exceeds the cutoff {} of {}", self.cutoff(), self.name);
        }
        let ring = self.ring;
        match &self.rule {
            Rule::Assoc => {
                let w = perm::unrank(x.0, x.1 as usize);
                let mut offsets = Vec::with_capacity(ys.len());
                let mut off = 0;
                for y in ys {
                    offsets.push(off);
                    off += y.0;
                }
                let mut out = Vec::with_capacity(total);
                for &j in &w {
                    let (r, y) = ys[j];
                    out.extend(perm::unrank(r, y as usize).into_iter().map(|v| v + offsets[j]));
                }
                SparseVec::unit(perm::rank(&out))
            }
            Rule::Comm => SparseVec::unit(0),
            Rule::Free(f) => {
                let (i, s) = f.compose(x, ys);
                SparseVec::single(i as usize, ring.sign(s))
            }
            Rule::Table(t) => t.gamma(x, ys),
        }
    }

    /// `x ∘_i y` with `i` 0-based.
    pub fn partial(&self, x: Op, i: usize, y: Op) -> SparseVec {
        if let Rule::Table(t) = &self.rule {
            if x.0 - 1 + y.0 > self.cutoff() {
                return SparseVec::new();
            }
            return t.partial(x, i, y);
        }
        let mut ys = vec![self.unit(); x.0];
        ys[i] = y;
        self.gamma(x, &ys)
    }

    /// Tabulates every partial composition within the cutoff.
    pub fn tabulate(&self) -> CompositionTable {
        let mut comps = BTreeMap::new();
        for m in 1..=self.cutoff() {
            for n in 1..=self.cutoff() + 1 - m {
                for a in 0..self.dim(m) as u32 {
                    for b in 0..self.dim(n) as u32 {
                        if self.is_unit((m, a)) || self.is_unit((n, b)) {
                            continue;
                        }
                        for i in 0..m {
                            let v = self.partial((m, a), i, (n, b));
                            comps.insert((m, n, i, a, b), v);
                        }
                    }
                }
            }
        }
        CompositionTable::new(self.seq.clone(), comps)
    }

    /// Levels as complexes, for display.
    pub fn level_complex(&self, r: usize) -> ChainComplex {
        self.seq.level(r).map_or_else(|| ChainComplex::zero(self.ring), |l| l.complex.clone())
    }

    pub fn ring_scalar(&self, n: i64) -> Scalar {
        self.ring.from_i64(n)
    }
}

/// A levelwise map of operads given on basis elements.
#[derive(Clone, Debug)]
pub struct OperadMap {
    pub source: Operad,
    pub target: Operad,
    pub images: BTreeMap<usize, Vec<SparseVec>>,
}

impl OperadMap {
    /// The quotient `O → τ_k O`.
    pub fn projection(o: &Operad, k: usize) -> Result<OperadMap, OperadError> {
        let target = o.truncation(k)?;
        let mut images = BTreeMap::new();
        for r in 1..=o.cutoff() {
            let n = o.dim(r);
            let imgs = (0..n).map(|x| if r <= k { SparseVec::unit(x) } else { SparseVec::new() }).collect();
            images.insert(r, imgs);
        }
        Ok(OperadMap { source: o.clone(), target, images })
    }

    pub fn compose(&self, first: &OperadMap) -> OperadMap {
        let ring = self.target.ring;
        let mut images = BTreeMap::new();
        for (&r, imgs) in &first.images {
            let out = imgs
                .iter()
                .map(|v| {
                    let mut acc = crate::exactalg::Accumulator::new();
                    for (j, c) in v.iter() {
                        if let Some(col) = self.images.get(&r).and_then(|m| m.get(j)) {
                            acc.add_vec(ring, c, col);
                        }
                    }
                    acc.finish()
                })
                .collect();
            images.insert(r, out);
        }
        OperadMap { source: first.source.clone(), target: self.target.clone(), images }
    }

    fn image(&self, op: Op) -> SparseVec {
        self.images.get(&op.0).and_then(|m| m.get(op.1 as usize)).cloned().unwrap_or_default()
    }

    /// Compatibility with units, the action and binary partial compositions.
    pub fn check(&self) -> Result<(), String> {
        let ring = self.source.ring;
        if self.image(self.source.unit()) != SparseVec::unit(0) {
            return Err("unit is not preserved".into());
        }
        let cut = self.source.cutoff();
        for m in 1..=cut {
            for x in 0..self.source.dim(m) as u32 {
                for i in 0..m.saturating_sub(1) {
                    let (y, s) = self.source.act(m, i, x);
                    let lhs = self.image((m, y)).scale(ring, &ring.sign(s));
                    let img = self.image((m, x));
                    let rhs = SparseVec::from_terms(
                        ring,
                        img.iter().map(|(j, c)| {
                            let (k, t) = self.target.act(m, i, j as u32);
                            (k as usize, ring.mul(c, &ring.sign(t)))
                        }),
                    );
                    if lhs != rhs {
                        return Err(format!("action not preserved at ({m}, {x}), s_{i}"));
                    }
                }
                for n in 1..=cut + 1 - m {
                    for y in 0..self.source.dim(n) as u32 {
                        for i in 0..m {
                            let c = self.source.partial((m, x), i, (n, y));
                            let mut lhs = crate::exactalg::Accumulator::new();
                            for (j, a) in c.iter() {
                                lhs.add_vec(ring, a, &self.image((m + n - 1, j as u32)));
                            }
                            let mut rhs = crate::exactalg::Accumulator::new();
                            for (p, a) in self.image((m, x)).iter() {
                                for (q, b) in self.image((n, y)).iter() {
                                    if m + n - 1 > self.target.cutoff() {
                                        continue;
                                    }
                                    let v = self.target.partial((m, p as u32), i, (n, q as u32));
                                    rhs.add_vec(ring, &ring.mul(a, b), &v);
                                }
                            }
                            if lhs.finish() != rhs.finish() {
                                return Err(format!("composition ({m},{x}) ∘_{} ({n},{y}) not preserved", i + 1));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: CoeffRing = CoeffRing::Rationals;

    #[test]
    fn preset_dimensions() {
        let a = Operad::assoc(Q, 3);
        assert_eq!((0..=3).map(|r| a.dim(r)).collect::<Vec<_>>(), vec![0, 1, 2, 6]);
        let c = Operad::comm(Q, 4).unwrap();
        assert_eq!((0..=4).map(|r| c.dim(r)).collect::<Vec<_>>(), vec![0, 1, 1, 1, 1]);
        assert!(Operad::comm(CoeffRing::Integers, 4).is_err());
        assert!(Operad::comm(CoeffRing::prime_field(3).unwrap(), 4).is_err());
        assert!(Operad::comm(CoeffRing::prime_field(7).unwrap(), 4).unwrap().experimental);
        let t1 = a.truncation(1).unwrap();
        assert_eq!(t1.seq().support(), vec![1]);
        assert!(a.truncation(0).is_err());
    }

    #[test]
    fn assoc_composition_substitutes_words() {
        let a = Operad::assoc(Q, 4);
        // x2x1 ∘ (x1x2, x1): substitute, giving x3 x1 x2.
        let x = (2, perm::rank(&[1, 0]) as u32);
        let y = (2, 0);
        let v = a.gamma(x, &[y, (1, 0)]);
        assert_eq!(v, SparseVec::unit(perm::rank(&[2, 0, 1])));
        let t2 = a.truncation(2).unwrap();
        assert!(t2.gamma((2, 0), &[(2, 0), (2, 0)]).is_empty());
    }

    #[test]
    fn projections_compose() {
        let a = Operad::assoc(Q, 4);
        let p3 = OperadMap::projection(&a, 3).unwrap();
        let p2 = OperadMap::projection(&a, 2).unwrap();
        p3.check().unwrap();
        p2.check().unwrap();
        let t3 = a.truncation(3).unwrap();
        let p32 = OperadMap::projection(&t3, 2).unwrap();
        p32.check().unwrap();
        let comp = p32.compose(&p3);
        assert_eq!(comp.images, p2.images);
    }
}
