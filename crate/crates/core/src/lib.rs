pub mod algebra;
pub mod config;
pub mod corpus;
pub mod derivation;
pub mod diffop;
pub mod envelope;
pub mod error;
pub mod format;
pub mod frobenius;
pub mod gpi;
pub mod linalg;
pub mod models;
pub mod report;

pub use error::{Error, Result};
