use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("objective returned a non-finite value ({value})")]
    NonFiniteValue { value: f64 },

    #[error("non-finite entry at index {index}")]
    NonFiniteEntry { index: usize },

    #[error("iterate became non-finite at iteration {iteration}")]
    NonFiniteIterate { iteration: u64 },

    #[error("inner maximization did not converge in {iterations} iterations (best value {best})")]
    InnerNotConverged { iterations: usize, best: f64 },

    #[error("system is numerically singular (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Failures of the numerics rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonFiniteValue { .. }
                | Error::NonFiniteEntry { .. }
                | Error::NonFiniteIterate { .. }
                | Error::InnerNotConverged { .. }
                | Error::Singular { .. }
        )
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
