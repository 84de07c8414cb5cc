//! Limits of towers of free graded modules.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;
use serde::Serialize;

use super::homology::AbGroup;
use crate::exactalg::{rank, smith_normal_form, CoeffRing, SparseMatrix, SparseVec};
use crate::exactalg::snf::determinant;

/// `A_0 ← A_1 ← … ← A_K`, each stage a free graded module given by its
/// ranks, `maps[k]: A_{k+1} → A_k` per degree.
#[derive(Clone, Debug)]
pub struct GradedTower {
    pub ring: CoeffRing,
    pub stages: Vec<BTreeMap<i32, usize>>,
    pub maps: Vec<BTreeMap<i32, SparseMatrix>>,
    /// The index from which the maps are claimed to be isomorphisms.
    pub declared_stable: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerLimits {
    pub lim: BTreeMap<i32, AbGroup>,
    pub lim1: BTreeMap<i32, AbGroup>,
    /// First index from which all maps are isomorphisms, per degree.
    pub stable_from: BTreeMap<i32, Option<usize>>,
    pub inconclusive: BTreeSet<i32>,
    pub mittag_leffler: bool,
}

impl GradedTower {
    pub fn new(ring: CoeffRing) -> Self {
        GradedTower { ring, stages: Vec::new(), maps: Vec::new(), declared_stable: None }
    }

    pub fn constant(ring: CoeffRing, ranks: BTreeMap<i32, usize>, len: usize) -> Self {
        let mut t = GradedTower::new(ring);
        for k in 0..len {
            t.stages.push(ranks.clone());
            if k > 0 {
                t.maps.push(ranks.iter().map(|(&n, &r)| (n, SparseMatrix::identity(ring, r))).collect());
            }
        }
        t
    }

    fn rank_at(&self, k: usize, n: i32) -> usize {
        self.stages[k].get(&n).copied().unwrap_or(0)
    }

    fn map_at(&self, k: usize, n: i32) -> SparseMatrix {
        self.maps[k]
            .get(&n)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zero(self.ring, self.rank_at(k, n), self.rank_at(k + 1, n)))
    }

    fn matrix_rank(&self, m: &SparseMatrix) -> usize {
        if self.ring.is_field() {
            rank(m).expect("field")
        } else {
            smith_normal_form(m).expect("Z").invariant_factors.len()
        }
    }

    fn is_iso(&self, m: &SparseMatrix) -> bool {
        if m.rows != m.cols {
            return false;
        }
        if self.ring.is_field() {
            return self.matrix_rank(m) == m.rows;
        }
        determinant(m).abs() == num_bigint::BigInt::from(1)
    }

    fn is_surjective(&self, m: &SparseMatrix) -> bool {
        if self.ring.is_field() {
            return self.matrix_rank(m) == m.rows;
        }
        let f = smith_normal_form(m).expect("Z").invariant_factors;
        f.len() == m.rows && f.iter().all(|x| x == &num_bigint::BigInt::from(1))
    }

    /// `δ: ∏_{k≤K} A_k → ∏_{k<K} A_k`, `(x_k) ↦ (x_k − f_k(x_{k+1}))`.
    fn delta(&self, n: i32) -> SparseMatrix {
        let ring = self.ring;
        let k_top = self.stages.len() - 1;
        let src_off: Vec<usize> = (0..=k_top).scan(0, |s, k| { let o = *s; *s += self.rank_at(k, n); Some(o) }).collect();
        let tgt_rows: usize = (0..k_top).map(|k| self.rank_at(k, n)).sum();
        let mut cols = Vec::new();
        for k in 0..=k_top {
            let f_prev = if k > 0 { Some(self.map_at(k - 1, n)) } else { None };
            for j in 0..self.rank_at(k, n) {
                let mut terms = Vec::new();
                if k < k_top {
                    terms.push((src_off[k] + j, ring.one()));
                }
                if let Some(f) = &f_prev {
                    for (i, c) in f.column(j).iter() {
                        terms.push((src_off[k - 1] + i, ring.neg(c)));
                    }
                }
                cols.push(SparseVec::from_terms(ring, terms));
            }
        }
        SparseMatrix::from_columns(ring, tgt_rows, cols)
    }

    pub fn lim_and_lim1(&self) -> TowerLimits {
        assert!(!self.stages.is_empty());
        let degrees: BTreeSet<i32> = self.stages.iter().flat_map(|s| s.keys().copied()).collect();
        let k_top = self.stages.len() - 1;
        let mut out = TowerLimits {
            lim: BTreeMap::new(),
            lim1: BTreeMap::new(),
            stable_from: BTreeMap::new(),
            inconclusive: BTreeSet::new(),
            mittag_leffler: true,
        };
        for &n in &degrees {
            let mut s = k_top;
            while s > 0 && self.is_iso(&self.map_at(s - 1, n)) {
                s -= 1;
            }
            if (0..k_top).any(|k| !self.is_surjective(&self.map_at(k, n))) {
                out.mittag_leffler = false;
            }
            let stable = match self.declared_stable {
                Some(d) => s <= d && d <= k_top,
                None => s < k_top,
            };
            out.stable_from.insert(n, stable.then_some(s));
            if !stable {
                out.inconclusive.insert(n);
            }
            let delta = self.delta(n);
            let r = if delta.cols == 0 || delta.rows == 0 { 0 } else { self.matrix_rank(&delta) };
            let coker = if self.ring.is_field() || delta.rows == 0 {
                AbGroup::free(delta.rows - r)
            } else {
                let f = smith_normal_form(&delta).expect("Z").invariant_factors;
                AbGroup {
                    rank: delta.rows - f.len(),
                    torsion: f.into_iter().filter(|x| x != &num_bigint::BigInt::from(1)).collect(),
                }
            };
            // Over a finite stored range δ is always onto.
            assert!(coker.is_zero(), "lim¹ of a finite tower must vanish");
            out.lim.insert(n, AbGroup::free(delta.cols - r));
            out.lim1.insert(n, coker);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_eventually_constant() {
        let q = CoeffRing::Rationals;
        let t = GradedTower::constant(q, [(0, 2)].into_iter().collect(), 4);
        let l = t.lim_and_lim1();
        assert_eq!(l.lim[&0], AbGroup::free(2));
        assert!(l.lim1[&0].is_zero());
        assert!(l.inconclusive.is_empty());

        let mut e = GradedTower::new(q);
        e.stages = vec![[(0, 1)].into_iter().collect(), [(0, 2)].into_iter().collect(), [(0, 2)].into_iter().collect()];
        e.maps = vec![
            [(0, SparseMatrix::from_dense(q, &[vec![1, 0]]))].into_iter().collect(),
            [(0, SparseMatrix::identity(q, 2))].into_iter().collect(),
        ];
        let l = e.lim_and_lim1();
        assert_eq!(l.lim[&0], AbGroup::free(2));
        assert_eq!(l.stable_from[&0], Some(1));
        assert!(l.mittag_leffler);
    }

    #[test]
    fn doubling_tower_is_inconclusive() {
        let z = CoeffRing::Integers;
        let mut t = GradedTower::new(z);
        for k in 0..4 {
            t.stages.push([(0, 1)].into_iter().collect());
            if k > 0 {
                t.maps.push([(0, SparseMatrix::from_dense(z, &[vec![2]]))].into_iter().collect());
            }
        }
        let l = t.lim_and_lim1();
        assert!(l.inconclusive.contains(&0));
        assert!(!l.mittag_leffler);
    }
}
