//! Sparse Gaussian elimination over a field.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use super::ring::{CoeffRing, RingError};
use super::sparse::{SparseMatrix, SparseVec};

/// How a new pivot is picked among the surviving entries of a reduced vector.
#[derive(Clone, Debug, Default)]
pub enum PivotRule {
    /// Smallest index.
    #[default]
    Lowest,
    /// Smallest weight, ties broken by smallest index.
    Weighted(Vec<u32>),
}

impl PivotRule {
    fn choose(&self, v: &SparseVec) -> usize {
        match self {
            PivotRule::Lowest => v.min_index().unwrap(),
            PivotRule::Weighted(w) => v
                .indices()
                .min_by_key(|&i| (w.get(i).copied().unwrap_or(u32::MAX), i))
                .unwrap(),
        }
    }
}

/// An echelon basis of a subspace of `ring^n`.
///
/// Stored vector `k` has no entry at the pivots of vectors `0..k`, so
/// reducing by pivots in insertion order yields a normal form supported
/// off the pivot set.
#[derive(Clone, Debug)]
pub struct Reducer {
    ring: CoeffRing,
    vecs: Vec<SparseVec>,
    pivots: Vec<u32>,
    pivot_of: HashMap<u32, usize>,
    combos: Option<Vec<SparseVec>>,
    inserted: usize,
    rule: PivotRule,
}

/// Result of inserting a vector into a [`Reducer`].
#[derive(Clone, Debug)]
pub enum Insert {
    /// The vector was independent; its pivot index.
    Pivot(usize),
    /// The vector was dependent; with tracking on, the relation among the
    /// inserted generators (including the new one) that exhibits this.
    Dependent(Option<SparseVec>),
}

impl Reducer {
    pub fn new(ring: CoeffRing) -> Self {
        Self::with_rule(ring, PivotRule::Lowest, false)
    }

    pub fn tracking(ring: CoeffRing) -> Self {
        Self::with_rule(ring, PivotRule::Lowest, true)
    }

    pub fn with_rule(ring: CoeffRing, rule: PivotRule, track: bool) -> Self {
        assert!(ring.is_field(), "Reducer needs a field");
        Reducer {
            ring,
            vecs: Vec::new(),
            pivots: Vec::new(),
            pivot_of: HashMap::new(),
            combos: if track { Some(Vec::new()) } else { None },
            inserted: 0,
            rule,
        }
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn rank(&self) -> usize {
        self.vecs.len()
    }

    pub fn pivots(&self) -> &[u32] {
        &self.pivots
    }

    pub fn is_pivot(&self, i: usize) -> bool {
        self.pivot_of.contains_key(&(i as u32))
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.vecs
    }

    fn reduce_inner(&self, mut v: SparseVec, mut combo: Option<&mut SparseVec>) -> SparseVec {
        let ring = self.ring;
        let mut heap: BinaryHeap<Reverse<usize>> = v
            .indices()
            .filter_map(|i| self.pivot_of.get(&(i as u32)).copied())
            .map(Reverse)
            .collect();
        while let Some(Reverse(k)) = heap.pop() {
            let p = self.pivots[k] as usize;
            let x = v.get(p);
            if x.is_zero() {
                continue;
            }
            let r = &self.vecs[k];
            let lam = ring.neg(&ring.div(&x, &r.get(p)));
            for i in r.indices() {
                if let Some(&k2) = self.pivot_of.get(&(i as u32)) {
                    if k2 > k {
                        heap.push(Reverse(k2));
                    }
                }
            }
            v = v.axpy(ring, &lam, r);
            if let (Some(c), Some(cs)) = (combo.as_deref_mut(), self.combos.as_ref()) {
                *c = c.axpy(ring, &lam, &cs[k]);
            }
        }
        v
    }

    /// Normal form of `v` modulo the span.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        self.reduce_inner(v.clone(), None)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Inserts `v` as generator number `self.inserted()`.
    pub fn insert(&mut self, v: &SparseVec) -> Insert {
        let id = self.inserted;
        self.inserted += 1;
        let mut combo = SparseVec::unit(id);
        let tracking = self.combos.is_some();
        let r = self.reduce_inner(v.clone(), if tracking { Some(&mut combo) } else { None });
        if r.is_empty() {
            return Insert::Dependent(if tracking { Some(combo) } else { None });
        }
        let p = self.rule.choose(&r);
        let k = self.vecs.len();
        self.pivots.push(p as u32);
        self.pivot_of.insert(p as u32, k);
        self.vecs.push(r);
        if let Some(cs) = self.combos.as_mut() {
            cs.push(combo);
        }
        Insert::Pivot(p)
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Coefficients expressing `v` in the inserted generators, if `v` lies in
    /// the span. Requires tracking.
    pub fn solve(&self, v: &SparseVec) -> Option<SparseVec> {
        assert!(self.combos.is_some(), "solve needs a tracking reducer");
        let ring = self.ring;
        let mut combo = SparseVec::new();
        let r = self.reduce_inner(v.clone(), Some(&mut combo));
        if !r.is_empty() {
            return None;
        }
        Some(combo.neg(ring))
    }
}

/// Outcome of eliminating the columns of a matrix.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub rank: usize,
    /// `(row, col)` pivot positions, in elimination order.
    pub pivots: Vec<(usize, usize)>,
    /// Basis of the kernel, as vectors over the column index.
    pub kernel: Vec<SparseVec>,
    /// Basis of the image: the pivot columns of the input.
    pub image: Vec<SparseVec>,
}

fn row_counts(m: &SparseMatrix) -> Vec<u32> {
    let mut rc = vec![0u32; m.rows];
    for col in m.columns() {
        for i in col.indices() {
            rc[i] += 1;
        }
    }
    rc
}

/// Column-by-column elimination. Columns are visited sparsest first and the
/// pivot of each reduced column is the entry whose row is sparsest in the
/// input; both orders break ties by lowest index.
pub fn eliminate(m: &SparseMatrix, want_kernel: bool) -> Result<Elimination, RingError> {
    m.ring.require_field()?;
    let mut order: Vec<usize> = (0..m.cols).collect();
    order.sort_by_key(|&j| (m.column(j).len(), j));
    let mut red = Reducer::with_rule(m.ring, PivotRule::Weighted(row_counts(m)), want_kernel);
    let mut pivots = Vec::new();
    let mut kernel = Vec::new();
    let mut image = Vec::new();
    for &j in &order {
        match red.insert(m.column(j)) {
            Insert::Pivot(p) => {
                pivots.push((p, j));
                image.push(m.column(j).clone());
            }
            Insert::Dependent(Some(rel)) => {
                // rel is over insertion ids; translate back to columns.
                kernel.push(rel.remap(m.ring, |id| Some(order[id])));
            }
            Insert::Dependent(None) => {}
        }
    }
    Ok(Elimination { rank: pivots.len(), pivots, kernel, image })
}

/// Rank over a field.
pub fn rank(m: &SparseMatrix) -> Result<usize, RingError> {
    Ok(eliminate(m, false)?.rank)
}

/// Rank of a list of vectors over a field.
pub fn rank_of(ring: CoeffRing, vecs: &[SparseVec]) -> usize {
    let mut red = Reducer::new(ring);
    for v in vecs {
        red.insert(v);
    }
    red.rank()
}

pub fn kernel(m: &SparseMatrix) -> Result<Vec<SparseVec>, RingError> {
    Ok(eliminate(m, true)?.kernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::Scalar;
    use proptest::prelude::*;

    fn q() -> CoeffRing {
        CoeffRing::Rationals
    }

    #[test]
    fn small_ranks() {
        assert_eq!(rank(&SparseMatrix::identity(q(), 3)).unwrap(), 3);
        assert_eq!(rank(&SparseMatrix::zero(q(), 2, 4)).unwrap(), 0);
        assert_eq!(rank(&SparseMatrix::from_dense(q(), &[vec![2, 4], vec![1, 2]])).unwrap(), 1);
        let z = SparseMatrix::identity(CoeffRing::Integers, 2);
        assert!(rank(&z).is_err());
    }

    #[test]
    fn solve_recovers_combination() {
        let ring = q();
        let mut r = Reducer::tracking(ring);
        let a = SparseVec::from_terms(ring, [(0, Scalar::ONE), (1, Scalar::ONE)]);
        let b = SparseVec::from_terms(ring, [(1, Scalar::ONE), (2, Scalar::ONE)]);
        r.insert(&a);
        r.insert(&b);
        let target = a.axpy(ring, &Scalar::from_i64(3), &b);
        let c = r.solve(&target).unwrap();
        assert_eq!(c.get(0), Scalar::ONE);
        assert_eq!(c.get(1), Scalar::from_i64(3));
    }

    fn dense_rank(rows: &[Vec<i64>]) -> usize {
        // Fraction-free oracle on i128 with row swaps.
        let mut m: Vec<Vec<i128>> =
            rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let nr = m.len();
        let nc = if nr == 0 { 0 } else { m[0].len() };
        let mut rank = 0;
        for c in 0..nc {
            let Some(p) = (rank..nr).find(|&r| m[r][c] != 0) else { continue };
            m.swap(rank, p);
            for r in 0..nr {
                if r != rank && m[r][c] != 0 {
                    let (a, b) = (m[rank][c], m[r][c]);
                    for k in 0..nc {
                        m[r][k] = m[r][k] * a - m[rank][k] * b;
                    }
                    let g = m[r].iter().fold(0i128, |g, &x| num_integer::gcd(g, x));
                    if g > 1 {
                        for k in 0..nc {
                            m[r][k] /= g;
                        }
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    proptest! {
        #[test]
        fn rank_nullity(rows in prop::collection::vec(prop::collection::vec(-2i64..3, 6), 1..6)) {
            let m = SparseMatrix::from_dense(q(), &rows);
            let e = eliminate(&m, true).unwrap();
            prop_assert_eq!(e.rank + e.kernel.len(), m.cols);
            prop_assert_eq!(e.rank, dense_rank(&rows));
            for k in &e.kernel {
                prop_assert!(m.mul_vec(k).is_empty());
            }
        }
    }
}
