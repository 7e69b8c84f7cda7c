use thiserror::Error;

/// Errors produced by the discrimination library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty state set")]
    Empty,

    #[error("zero vector")]
    ZeroVector,

    #[error("Gram matrix is numerically singular (min eigenvalue {min_eigenvalue:.3e}); states are linearly dependent")]
    SingularGram { min_eigenvalue: f64 },

    #[error("{n} states cannot be linearly independent in dimension {dim}")]
    TooManyStates { n: usize, dim: usize },

    #[error("invalid priors: {0}")]
    InvalidPriors(String),

    #[error("index {index} out of range for {len} states")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("solver did not converge after {iterations} Newton steps (best duality gap {best_gap:.3e})")]
    NoConvergence {
        iterations: usize,
        best_gap: f64,
        best_p: Vec<f64>,
    },

    #[error("brute-force oracle limited to n <= {max}, got n = {n}")]
    TooLarge { n: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("reciprocal vector {} is not a product vector", index + 1)]
    NotProduct { index: usize },

    #[error("state {} is not a product vector", index + 1)]
    NotAllProduct { index: usize },

    #[error("reciprocal overlap <{}~|{}~> vanishes", index + 1, target + 1)]
    ZeroOverlap { index: usize, target: usize },

    #[error("states do not form a basis: {0}")]
    NotABasis(String),
}

pub type Result<T> = std::result::Result<T, Error>;
