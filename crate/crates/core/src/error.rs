use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime modulus")]
    NotPrime(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("elements belong to different algebras")]
    ParentMismatch,
    #[error("structure constants are not associative at (e{0}, e{1}, e{2})")]
    NotAssociative(usize, usize, usize),
    #[error("unit law fails for basis element e{0}")]
    NotUnital(usize),
    #[error("not a derivation: Leibniz rule fails at (e{0}, e{1})")]
    NotDerivation(usize, usize),
    #[error("not an ideal: {0}")]
    NotIdeal(String),
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// A mathematical property that must hold did not; this signals a bug or
    /// an inconsistent presentation, never an ordinary negative finding.
    #[error("violation: {0}")]
    Violation(String),
    #[error("undecided within budget: {0}")]
    Undecided(String),
}

impl Error {
    pub(crate) fn violation(msg: impl Into<String>) -> Self {
        Error::Violation(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn is_violation(&self) -> bool {
        matches!(self, Error::Violation(_))
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, Error::Undecided(_))
    }
}
