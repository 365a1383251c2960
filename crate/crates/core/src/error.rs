//! Error type shared across the library.

use thiserror::Error;

/// Errors produced by library operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A scalar argument fell outside its allowed domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An input value or matrix failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// A documented precondition was violated.
    #[error("precondition error: {0}")]
    Precondition(String),

    /// An iterative refinement did not reach its tolerance.
    #[error("convergence error: {0}")]
    Convergence(String),

    /// A root or contour search found no solution.
    #[error("not found: {0}")]
    NotFound(String),

    /// A run configuration is malformed or inconsistent.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
