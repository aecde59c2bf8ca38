use thiserror::Error;

/// Errors raised by the group, search and approximation routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unimodular (determinant {det})")]
    NotUnimodular { det: String },

    #[error("matrix is not square or is empty")]
    NotSquare,

    #[error("generator list is not closed under inverses: missing inverse of generator {index}")]
    AsymmetricGenerators { index: usize },

    #[error("generators do not appear to generate the group: {0}")]
    NotGenerating(String),

    #[error("generator index {index} out of range (have {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("matrix is quasi-unipotent: no contracting direction")]
    QuasiUnipotent,

    #[error("resource limit exceeded after radius {last_completed_radius}: {reason}")]
    LimitExceeded {
        last_completed_radius: usize,
        reason: String,
    },

    #[error("input precision insufficient to certify the result")]
    InsufficientPrecision,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("sublattice is not invariant under phi")]
    NotInvariant,

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
