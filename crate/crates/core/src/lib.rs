//! Exact computations with operads, their algebras, simplicial bar
//! constructions and homotopy completion towers over chain complexes.

pub mod algebra;
pub mod bar;
pub mod chain;
pub mod completion;
pub mod exactalg;
pub mod forest;
pub mod operad;
pub mod pushout;
pub mod symseq;

pub use exactalg::{CoeffRing, Scalar, SparseMatrix, SparseVec};
pub use algebra::{Algebra, AlgebraMap};
pub use bar::derived::{Params, RightModule};
pub use chain::{ChainComplex, ChainMap, HomologyReport};
pub use completion::{CompletionTower, Status, Verdict};
pub use operad::Operad;
