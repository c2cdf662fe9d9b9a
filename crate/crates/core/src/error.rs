//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Problem or generator parameters violate a documented precondition.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// An enumeration would exceed (or has exceeded) the evaluation budget.
    ///
    /// Raised instead of silently truncating a search.
    #[error("evaluation budget exceeded: {0}")]
    BudgetExceeded(String),

    /// A matrix that must be positive definite failed its factorization.
    #[error("matrix not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
