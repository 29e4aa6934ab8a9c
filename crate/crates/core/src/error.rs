use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("the sample contains no points")]
    NoPoints,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("brute-force oracle refused {count} points (bound {bound})")]
    OracleTooLarge { count: usize, bound: usize },
    #[error("unit mismatch: {0} vs {1}")]
    UnitMismatch(String, String),
    #[error("no path between the endpoints")]
    NoPath,
    #[error("decode error: {0}")]
    Decode(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
