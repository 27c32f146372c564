use std::process::ExitCode;

use g4s::distsim::DistError;
use g4s::engine::EngineError;
use g4s::routines::RoutineError;

/// Failure classes with their process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input: unreadable files, parse errors, shape mismatches. Exit 1.
    #[error("{0}")]
    Invalid(String),
    /// Something that should not happen on valid input. Exit 2.
    #[error("internal error: {0}")]
    Internal(String),
    /// A check requested by the user did not hold. Exit 3.
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Invalid(_) => 1,
            CliError::Internal(_) => 2,
            CliError::Verification(_) => 3,
        })
    }

    pub fn invalid(msg: impl std::fmt::Display) -> Self {
        CliError::Invalid(msg.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::ThreadPool(_) => CliError::Internal(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<DistError> for CliError {
    fn from(e: DistError) -> Self {
        match e {
            DistError::Engine(inner) => inner.into(),
            DistError::ShardCount { .. } | DistError::LengthMismatch { .. } => CliError::Invalid(e.to_string()),
            DistError::Codec(_) | DistError::Partition(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<RoutineError> for CliError {
    fn from(e: RoutineError) -> Self {
        match e {
            RoutineError::Engine(inner) => inner.into(),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
