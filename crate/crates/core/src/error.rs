use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid rank: n = {0}, need n >= 2")]
    InvalidRank(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("element not contained in {0}")]
    NotContained(String),
    #[error("enumeration of {needed} objects exceeds the guard {guard}")]
    ResourceGuard { needed: u128, guard: u128 },
    #[error("irregular element: {0}")]
    Irregular(String),
    #[error("non-convex complex: {0}")]
    NonConvex(String),
    #[error("field cannot represent {0}")]
    FieldUnsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precision(msg: impl Into<String>) -> Error {
    Error::InsufficientPrecision(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
