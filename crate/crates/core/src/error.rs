use thiserror::Error;

/// Errors raised by the numerical library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FkError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configuration value is invalid or inconsistent.
    #[error("config error: {0}")]
    Config(String),
    /// The free kernel was evaluated on its diagonal.
    #[error("singular kernel: x = y")]
    Singular,
    /// The iterative solver stopped before reaching its tolerance.
    #[error("solver error: {reason} after {iterations} iterations (relative residual {residual:e})")]
    Solver { reason: String, iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, FkError>;

pub(crate) fn domain(msg: impl Into<String>) -> FkError {
    FkError::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> FkError {
    FkError::Config(msg.into())
}
