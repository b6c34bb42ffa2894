use thiserror::Error;

/// Errors produced by the bound computations and verification suites.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method ran out of iterations. `best` is the estimate at that point.
    #[error("no convergence after {iterations} iterations (best estimate {best})")]
    NonConvergence { iterations: usize, best: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A documented precondition of an inequality check does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The instance is too large to enumerate exactly.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
}

pub type Result<T> = std::result::Result<T, BoundsError>;
