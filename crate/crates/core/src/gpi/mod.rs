//! Constants operators, generalized polynomial identities and standard
//! identities over quasi-Frobenius inner parts.

mod constants;
mod decompose;
mod identity;
mod poly;
mod standard;

pub use constants::{central_mixer, constants_operator, CentralMixer, ConstantsOperator};
pub use decompose::{qf_decomposition, Decomposition};
pub use identity::{
    build_gpi, holds_on, is_formally_trivial, monomial_tensor, slot_image, triviality_vs_br, BrConsistency,
    FormalTriviality, GeneralizedPoly, HoldsReport, MonomialTrace,
};
pub use poly::{permutations, MultilinearPoly, MAX_ARITY};
pub use standard::{min_standard_degree, standard_identity_check, MinStandardDegree, StandardIdentityReport};
