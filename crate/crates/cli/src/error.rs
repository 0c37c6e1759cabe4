use std::process::ExitCode;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    /// Finished; solves are optimal (or a heuristic completed).
    pub const OK: u8 = 0;
    /// Output could not be written or another runtime failure.
    pub const FAILURE: u8 = 1;
    /// Bad flags, bad config, or an unreadable or invalid input file.
    pub const USAGE: u8 = 2;
    /// A solve stopped at its time budget before proving optimality.
    pub const TIMEOUT: u8 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) | CliError::Invalid(_) => exit::USAGE,
            CliError::Failure(_) => exit::FAILURE,
        })
    }
}
