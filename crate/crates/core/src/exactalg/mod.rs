//! Exact scalars, rings and sparse linear algebra.

pub mod elim;
pub mod ring;
pub mod scalar;
pub mod snf;
pub mod sparse;
pub mod subspace;

pub use elim::{eliminate, kernel, rank, rank_of, Elimination, Insert, PivotRule, Reducer};
pub use ring::{CoeffRing, RingError};
pub use scalar::Scalar;
pub use snf::{cokernel_presentation, smith_normal_form, SnfResult};
pub use sparse::{Accumulator, SparseMatrix, SparseVec};
pub use subspace::{LinearMap, Span, Subquotient};
