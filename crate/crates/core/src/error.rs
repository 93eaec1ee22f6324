//! Error types shared across the crate.

use thiserror::Error;

/// Everything that can go wrong in state, operator, and protocol code.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Register or operator size outside the supported range.
    #[error("size error: {0}")]
    Size(String),

    /// Unknown, duplicate, or clashing qubit labels.
    #[error("label error: {0}")]
    Label(String),

    /// Dimension mismatch between operators, states, or target lists.
    #[error("shape error: {0}")]
    Shape(String),

    /// An input that must be normalized is not.
    #[error("normalization error: {0}")]
    Normalization(String),

    /// Bell or outcome index outside 1..=4.
    #[error("index error: {0}")]
    Index(String),

    /// Operator singular within tolerance; no inverse exists.
    #[error("singular error: {0}")]
    Singular(String),

    /// Domain-value validation failure (non-finite, negative, unnormalized...).
    #[error("validation error: {0}")]
    Validation(String),

    /// The Pauli-pair times diagonal factorization did not reconstruct the input.
    #[error("factorization error: {0}")]
    Factorization(String),

    /// A measurement outcome with probability zero was explicitly requested.
    #[error("zero-probability outcome: {0}")]
    ZeroProbabilityOutcome(String),
}

pub type Result<T> = std::result::Result<T, Error>;
