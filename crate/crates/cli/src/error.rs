use std::path::Path;

use crossalloc::{AllocationError, DatasetError, DeaError, GameError};
use thiserror::Error;

/// Failures grouped by the exit code they map to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    /// Attaches the offending file to a loader error.
    pub fn dataset(path: &Path, err: DatasetError) -> Self {
        match err {
            DatasetError::Io(e) => CliError::io(path, e),
            other => CliError::Validation(format!("{}: {other}", path.display())),
        }
    }
}

impl From<DeaError> for CliError {
    fn from(err: DeaError) -> Self {
        match err {
            DeaError::Lp(_) | DeaError::Solver { .. } | DeaError::ZeroVirtualInput { .. } => {
                CliError::Numerical(err.to_string())
            }
            DeaError::IndexOutOfRange { .. }
            | DeaError::ClusterCount { .. }
            | DeaError::GroupSize { .. }
            | DeaError::Matrix(_) => CliError::Validation(err.to_string()),
        }
    }
}

impl From<GameError> for CliError {
    fn from(err: GameError) -> Self {
        match err {
            GameError::DegenerateDenominator { .. } => CliError::Numerical(err.to_string()),
            GameError::TooManyPlayers { .. } | GameError::NotMember { .. } | GameError::ReferenceLength { .. } => {
                CliError::Validation(err.to_string())
            }
        }
    }
}

impl From<AllocationError> for CliError {
    fn from(err: AllocationError) -> Self {
        match err {
            AllocationError::NonPositiveShapley { .. } => CliError::Numerical(err.to_string()),
            AllocationError::Revenue(_) | AllocationError::Empty => CliError::Validation(err.to_string()),
        }
    }
}
