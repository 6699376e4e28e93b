//! CLI error taxonomy with the exit-code contract:
//! 0 success, 1 usage error, 2 data error, 3 internal error.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad invocation: missing or inconsistent flags.
    #[error("{0}")]
    Usage(String),

    /// Unusable input data: missing files, bad formats, impossible requests.
    #[error("{0}")]
    Data(String),

    /// Bugs and environment failures that are not the user's fault.
    #[error("internal: {0}")]
    Internal(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<lfpad::Error> for CliError {
    fn from(err: lfpad::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Data(err.to_string())
    }
}
