use std::path::PathBuf;

use fpp_lab::LabError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error(transparent)]
    Core(#[from] fpp_core::Error),
    #[error("corrupt output {0}")]
    Corrupt(String),
    #[error("acceptance failed: {0} of {1} criteria")]
    Acceptance(usize, usize),
    #[error("replay mismatch: {0}")]
    Replay(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Process exit status for each error class.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const FAILURE: i32 = 2;
    pub const ACCEPTANCE: i32 = 3;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Corrupt(_) => exit::CONFIG,
            CliError::Acceptance(..) => exit::ACCEPTANCE,
            _ => exit::FAILURE,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}
