//! Unital associative algebras given by structure constants.

mod element;
mod ideals;
mod presentation;
mod semiprime;

pub use element::AlgebraElement;
pub use ideals::{direct_sum, elements, DirectSum, IdealLattice, Side};
pub(crate) use ideals::sort_subspaces;
pub use semiprime::SemiprimeVerdict;
pub use presentation::{unit_vector, AlgebraPresentation, DENSE_LIMIT};
