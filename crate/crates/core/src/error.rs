use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `base^copies = dim > cap`.
    #[error("dimension {base}^{copies} = {dim} exceeds the cap of {cap}")]
    DimensionCapExceeded { base: usize, copies: usize, dim: u128, cap: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("eigensolver did not converge (dimension {dim}, Frobenius norm {norm:.6e})")]
    ConvergenceFailure { dim: usize, norm: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("config error: {0}")]
    ConfigError(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("all error values are exactly zero; exponent is -inf")]
    AllErrorsZero,
}
