//! Subspaces of `k^n` given by spanning sets, and the operations the
//! spectral sequence needs on them.

use super::elim::{eliminate, Insert, Reducer};
use super::ring::CoeffRing;
use super::sparse::{SparseMatrix, SparseVec};

/// A subspace of `k^dim` with an independent basis.
#[derive(Clone, Debug)]
pub struct Span {
    pub ring: CoeffRing,
    pub dim_ambient: usize,
    basis: Vec<SparseVec>,
    red: Reducer,
}

impl Span {
    pub fn zero(ring: CoeffRing, n: usize) -> Self {
        Span { ring, dim_ambient: n, basis: Vec::new(), red: Reducer::new(ring) }
    }

    pub fn full(ring: CoeffRing, n: usize) -> Self {
        Span::of(ring, n, (0..n).map(SparseVec::unit))
    }

    pub fn of(ring: CoeffRing, n: usize, vecs: impl IntoIterator<Item = SparseVec>) -> Self {
        let mut s = Span::zero(ring, n);
        for v in vecs {
            s.add(v);
        }
        s
    }

    /// Adds a vector; returns whether the dimension grew.
    pub fn add(&mut self, v: SparseVec) -> bool {
        match self.red.insert(&v) {
            Insert::Pivot(_) => {
                self.basis.push(v);
                true
            }
            Insert::Dependent(_) => false,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.red.contains(v)
    }

    pub fn contains_span(&self, other: &Span) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Span) -> Span {
        let mut s = self.clone();
        for v in &other.basis {
            s.add(v.clone());
        }
        s
    }

    pub fn intersect(&self, other: &Span) -> Span {
        // x = sum a_i u_i = sum b_j w_j: kernel of [U | -W].
        let ring = self.ring;
        let mut cols: Vec<SparseVec> = self.basis.clone();
        cols.extend(other.basis.iter().map(|w| w.neg(ring)));
        let m = SparseMatrix::from_columns(ring, self.dim_ambient, cols);
        let k = self.basis.len();
        let ker = eliminate(&m, true).expect("field").kernel;
        let vecs = ker.into_iter().map(|c| {
            let mut acc = SparseVec::new();
            for (i, a) in c.iter() {
                if i < k {
                    acc = acc.axpy(ring, a, &self.basis[i]);
                }
            }
            acc
        });
        Span::of(ring, self.dim_ambient, vecs)
    }

    /// `f(self)` where `f` is given by the images of the ambient unit vectors.
    pub fn image(&self, f: &LinearMap) -> Span {
        Span::of(self.ring, f.target_dim, self.basis.iter().map(|v| f.apply(v)))
    }
}

/// A linear map `k^source -> k^target` stored by columns.
#[derive(Clone, Debug)]
pub struct LinearMap {
    pub ring: CoeffRing,
    pub source_dim: usize,
    pub target_dim: usize,
    pub columns: Vec<SparseVec>,
}

impl LinearMap {
    pub fn new(ring: CoeffRing, source_dim: usize, target_dim: usize, columns: Vec<SparseVec>) -> Self {
        assert_eq!(columns.len(), source_dim);
        LinearMap { ring, source_dim, target_dim, columns }
    }

    pub fn zero(ring: CoeffRing, source_dim: usize, target_dim: usize) -> Self {
        LinearMap::new(ring, source_dim, target_dim, vec![SparseVec::new(); source_dim])
    }

    pub fn identity(ring: CoeffRing, n: usize) -> Self {
        LinearMap::new(ring, n, n, (0..n).map(SparseVec::unit).collect())
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut acc = super::sparse::Accumulator::new();
        for (j, c) in v.iter() {
            acc.add_vec(self.ring, c, &self.columns[j]);
        }
        acc.finish()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        assert_eq!(other.target_dim, self.source_dim);
        LinearMap::new(
            self.ring,
            other.source_dim,
            self.target_dim,
            other.columns.iter().map(|c| self.apply(c)).collect(),
        )
    }

    pub fn rank(&self) -> usize {
        super::elim::rank_of(self.ring, &self.columns)
    }

    pub fn kernel(&self) -> Span {
        let m = SparseMatrix::from_columns(self.ring, self.target_dim, self.columns.clone());
        Span::of(self.ring, self.source_dim, eliminate(&m, true).expect("field").kernel)
    }

    pub fn image(&self) -> Span {
        Span::of(self.ring, self.target_dim, self.columns.iter().cloned())
    }

    /// `{x : f(x) ∈ w}`.
    pub fn preimage(&self, w: &Span) -> Span {
        let cols: Vec<SparseVec> = self.columns.iter().map(|c| w.red.reduce(c)).collect();
        let m = SparseMatrix::from_columns(self.ring, self.target_dim, cols);
        Span::of(self.ring, self.source_dim, eliminate(&m, true).expect("field").kernel)
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.source_dim
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.target_dim
    }
}

/// A subquotient `top / bottom` with a chosen basis and coordinates.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub ring: CoeffRing,
    /// Representatives of the chosen basis, in the ambient space.
    pub reps: Vec<SparseVec>,
    n_bottom: usize,
    red: Reducer,
}

impl Subquotient {
    /// `bottom` must be contained in `top`.
    pub fn new(top: &Span, bottom: &Span) -> Self {
        let ring = top.ring;
        let mut red = Reducer::tracking(ring);
        for v in bottom.basis() {
            red.insert(v);
        }
        let n_bottom = red.inserted();
        let mut reps = Vec::new();
        for v in top.basis() {
            if let Insert::Pivot(_) = red.insert(v) {
                reps.push(v.clone());
            }
        }
        // Rebuild so generator ids are [bottom..., reps...].
        let mut red = Reducer::tracking(ring);
        for v in bottom.basis().iter().chain(reps.iter()) {
            red.insert(v);
        }
        Subquotient { ring, reps, n_bottom, red }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Coordinates of the class of `v`; `None` when `v` is outside `top`.
    pub fn coords(&self, v: &SparseVec) -> Option<SparseVec> {
        let c = self.red.solve(v)?;
        let nb = self.n_bottom;
        Some(c.remap(self.ring, |i| i.checked_sub(nb)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::Scalar;

    #[test]
    fn intersection_and_preimage() {
        let q = CoeffRing::Rationals;
        let a = Span::of(q, 3, [SparseVec::unit(0), SparseVec::unit(1)]);
        let b = Span::of(q, 3, [SparseVec::unit(1), SparseVec::unit(2)]);
        assert_eq!(a.intersect(&b).dim(), 1);
        let f = LinearMap::new(q, 2, 3, vec![SparseVec::unit(2), SparseVec::unit(0)]);
        assert_eq!(f.preimage(&a).dim(), 1);
        let sq = Subquotient::new(&Span::full(q, 3), &a);
        assert_eq!(sq.dim(), 1);
        let v = SparseVec::from_terms(q, [(0, Scalar::ONE), (2, Scalar::from_i64(5))]);
        assert_eq!(sq.coords(&v).unwrap(), SparseVec::single(0, Scalar::from_i64(5)));
    }
}
