use thiserror::Error;

/// Library-wide error type.
///
/// `Domain`, `Config` and `Unsupported` indicate bad inputs; the remaining
/// variants indicate numerical trouble during an otherwise valid request.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A root/target value is not attainable for the given inputs.
    #[error("no solution: {0}")]
    NoSolution(String),
    /// An iterative scheme failed to reach its tolerance.
    #[error("failed to converge: {0}")]
    Convergence(String),
    /// A linear system is singular or too ill-conditioned to trust.
    #[error("singular system: {0}")]
    Singular(String),
    /// Inconsistent or invalid configuration data.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// The requested operation is not defined for this instrument kind.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
