use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A kernel, field or problem description is malformed.
    #[error("invalid input: {0}")]
    Validation(String),

    /// The field takes finite values at too few points for the requested node count.
    #[error("field is not admissible: {0}")]
    Admissibility(String),

    /// A node system is outside the regularity set.
    #[error("node system is not regular: {0}")]
    Regularity(String),

    /// The kernel does not satisfy the hypotheses an operation relies on.
    #[error("kernel hypotheses violated: {0}")]
    Hypothesis(String),

    /// A precondition on the arguments of an operation failed.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// An iterative solver stopped without meeting its tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    /// A grid search would exceed the configured evaluation budget.
    #[error("evaluation budget exceeded: {0}")]
    Budget(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
