//! Symmetric sequences, their tensor and circle products.

pub mod canon;
pub mod perm;
pub mod seq;

pub use canon::{blocks_of, sort_items, Blocks, Canon, Canonicalizer, GeneratorAction, OrbitTable};
pub use perm::Perm;
pub use seq::{circle, coinvariants, tensor_check, tensor_power, Level, SymSeq, SymSeqError, TensorPower};
