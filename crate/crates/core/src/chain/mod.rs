//! Chain complexes over an exact coefficient ring.

pub mod complex;
pub mod homology;

pub use complex::{cone, ChainBuilder, ChainComplex, ChainError, ChainMap, Quotient};
pub use homology::{connectivity, homology, induced_map, AbGroup, Homology, HomologyReport, Reduction};
pub mod io;
pub mod tensor;
pub mod tower;

pub use tensor::{tensor, tensor_window, totalize, Bicomplex};
pub use tower::{GradedTower, TowerLimits};
