use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] fpp_core::Error),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{excluded} of {replicas} replicas uncertified (limit 1%)")]
    TooManyExclusions { excluded: usize, replicas: usize },
    #[error("theta = {theta} violates the ubiquity gate theta < {gate}")]
    Gate { theta: f64, gate: f64 },
    #[error("malformed report: {0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn invalid(msg: impl Into<String>) -> LabError {
    LabError::Invalid(msg.into())
}
