//! Exact linear algebra over prime fields.

mod matrix;
pub mod scalar;
mod subspace;

pub use matrix::{FpMatrix, Rref};
pub use scalar::FpScalar;
pub use subspace::{for_each_projective_point, normalize_leading, projective_count, Subspace};
