use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Operands of different truncation orders.
    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    /// Exhaustive enumeration requested beyond its size guard.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Deconvolution by a sequence whose leading coefficient vanishes.
    #[error("singular deconvolution: {0}")]
    SingularDeconvolution(String),

    #[error("evaluation point {0} is a pole")]
    Pole(String),

    /// Truncated moment series cannot be trusted at the requested point.
    #[error("series does not converge: {0}")]
    Convergence(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    Solver { iterations: usize, residual: f64 },

    #[error("root not bracketed: {0}")]
    NoBracket(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
