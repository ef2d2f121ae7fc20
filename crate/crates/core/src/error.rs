use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Cholesky pivot `pivot` fell below the definiteness threshold.
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integrand returned a non-finite value at t = {point:?}")]
    NonFinite { point: Vec<f64> },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("jet order {available} is too low, {needed} required")]
    JetOrder { needed: usize, available: usize },

    #[error("form context mismatch")]
    ContextMismatch,
}
