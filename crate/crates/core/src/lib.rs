//! Combinatorial maps, switch posets, tensor trace invariants and moment
//! machinery for free probability of random tensors.

pub mod combmap;
pub mod distribution;
pub mod error;
pub mod moments;
pub mod poset;
pub mod randgen;
pub mod scalar;
pub mod tensoreval;

pub use combmap::{CombMap, ColoredMap, MapKind, Permutation};
pub use error::{Error, Result};
pub use scalar::Scalar;
