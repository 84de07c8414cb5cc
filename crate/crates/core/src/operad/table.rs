//! Operads given by tables of partial compositions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chain::ChainBuilder;
use crate::exactalg::{Accumulator, CoeffRing, Scalar, SparseVec};
use crate::symseq::{Level, SymSeq};

use super::{Op, OperadError};

/// Key `(m, n, i, a, b)` for `(m, a) ∘_i (n, b)`, `i` 0-based.
pub type CompKey = (usize, usize, usize, u32, u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionTable {
    pub seq: SymSeq,
    comps: BTreeMap<CompKey, SparseVec>,
}

impl CompositionTable {
    pub fn new(seq: SymSeq, comps: BTreeMap<CompKey, SparseVec>) -> Self {
        CompositionTable { seq, comps }
    }

    pub fn entries(&self) -> &BTreeMap<CompKey, SparseVec> {
        &self.comps
    }

    pub fn set(&mut self, key: CompKey, v: SparseVec) {
        self.comps.insert(key, v);
    }

    pub fn partial(&self, x: Op, i: usize, y: Op) -> SparseVec {
        if y == (1, 0) {
            return SparseVec::unit(x.1 as usize);
        }
        if x == (1, 0) {
            return SparseVec::unit(y.1 as usize);
        }
        self.comps.get(&(x.0, y.0, i, x.1, y.1)).cloned().unwrap_or_default()
    }

    /// `γ` as iterated partial compositions from the last input.
    pub fn gamma(&self, x: Op, ys: &[Op]) -> SparseVec {
        let ring = self.seq.ring;
        let mut cur = SparseVec::unit(x.1 as usize);
        let mut arity = x.0;
        for j in (0..ys.len()).rev() {
            let y = ys[j];
            if y == (1, 0) {
                continue;
            }
            let mut acc = Accumulator::new();
            for (k, c) in cur.iter() {
                acc.add_vec(ring, c, &self.partial((arity, k as u32), j, y));
            }
            cur = acc.finish();
            arity += y.0 - 1;
        }
        cur
    }
}

#[derive(Serialize, Deserialize)]
struct LevelSpec {
    arity: usize,
    labels: Vec<String>,
    /// `action[i][x] = [x·s_i, sign]`.
    #[serde(default)]
    action: Vec<Vec<(u32, i8)>>,
}

#[derive(Serialize, Deserialize)]
struct CompSpec {
    m: usize,
    n: usize,
    /// 1-based input position.
    i: usize,
    a: u32,
    b: u32,
    value: Vec<(u32, Scalar)>,
}

#[derive(Serialize, Deserialize)]
pub struct OperadFile {
    format: String,
    pub name: String,
    ring: CoeffRing,
    cutoff: usize,
    levels: Vec<LevelSpec>,
    compositions: Vec<CompSpec>,
}

impl OperadFile {
    pub fn from_table(name: &str, t: &CompositionTable) -> Self {
        let levels = t
            .seq
            .levels()
            .map(|(r, l)| LevelSpec { arity: r, labels: l.complex.labels().to_vec(), action: l.gens.clone() })
            .collect();
        let compositions = t
            .comps
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(&(m, n, i, a, b), v)| CompSpec {
                m,
                n,
                i: i + 1,
                a,
                b,
                value: v.iter().map(|(k, c)| (k as u32, c.clone())).collect(),
            })
            .collect();
        OperadFile { format: "operad".into(), name: name.into(), ring: t.seq.ring, cutoff: t.seq.cutoff, levels, compositions }
    }

    pub fn into_table(self) -> Result<(String, CompositionTable), OperadError> {
        if self.format != "operad" {
            return Err(OperadError::Invalid(format!("expected format \"operad\", found {:?}", self.format)));
        }
        let ring = self.ring;
        let mut seq = SymSeq::zero(ring, self.cutoff);
        for l in self.levels {
            let mut b = ChainBuilder::new(ring);
            for lab in &l.labels {
                b.add_cell(lab.clone(), 0);
            }
            let n = l.labels.len();
            let gens = if l.action.is_empty() && l.arity >= 2 {
                (0..l.arity - 1).map(|_| (0..n as u32).map(|x| (x, 1)).collect()).collect()
            } else {
                l.action
            };
            seq.insert_level(l.arity, Level { complex: b.build_unchecked(), gens })?;
        }
        let mut comps = BTreeMap::new();
        for c in self.compositions {
            if c.i == 0 || c.i > c.m {
                return Err(OperadError::Invalid(format!("composition position {} out of range 1..={}", c.i, c.m)));
            }
            let target = c.m + c.n - 1;
            if c.a as usize >= seq.dim(c.m) || c.b as usize >= seq.dim(c.n) {
                return Err(OperadError::Invalid(format!("composition ({},{}) ∘ ({},{}) names a missing basis element", c.m, c.a, c.n, c.b)));
            }
            if c.value.iter().any(|(k, _)| *k as usize >= seq.dim(target)) {
                return Err(OperadError::Invalid(format!("composition value outside level {target}")));
            }
            let v = SparseVec::from_terms(ring, c.value.into_iter().map(|(k, s)| (k as usize, ring.normalize(s))));
            comps.insert((c.m, c.n, c.i - 1, c.a, c.b), v);
        }
        Ok((self.name, CompositionTable::new(seq, comps)))
    }
}
