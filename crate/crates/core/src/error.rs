use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid scalar literal: {0}")]
    InvalidScalar(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("degree {degree} lies outside the materialized window [{lo}, {hi}]")]
    WindowInsufficient { degree: i32, lo: i32, hi: i32 },
    #[error("not a chain map: {0}")]
    NotClosed(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("unknown object: {0}")]
    UnknownObject(String),
    #[error("presentation mismatch: {0}")]
    PresentationMismatch(String),
    #[error("variance mismatch: {0}")]
    VarianceMismatch(String),
    #[error("base category mismatch: {0}")]
    BaseMismatch(String),
    #[error("non-composable word: {0}")]
    NonComposable(String),
    #[error("d^2 != 0: {0}")]
    DSquaredNonzero(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("basis size {size} exceeds the configured cap {cap}")]
    CapExceeded { size: usize, cap: usize },
}
