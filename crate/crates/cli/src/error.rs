use std::path::PathBuf;

use dekap_core::distiller::DistillError;
use dekap_core::netgen::GenError;
use dekap_core::solvers::SolveError;
use dekap_core::ModelError;
use thiserror::Error;

/// Process exit codes. `2` is left to clap for usage errors.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VALIDATION: i32 = 3;
    pub const GUARD: i32 = 4;
    pub const IO: i32 = 5;
    pub const CONFIG: i32 = 6;
    pub const DIVERGED: i32 = 7;
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Input files that fail validation, or policies violating constraints.
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Guard(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Diverged(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => exit::VALIDATION,
            CliError::Guard(_) => exit::GUARD,
            CliError::Io { .. } => exit::IO,
            CliError::Config(_) => exit::CONFIG,
            CliError::Diverged(_) => exit::DIVERGED,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Io(source) => CliError::Io { path: PathBuf::new(), source },
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::GuardExceeded { .. } => CliError::Guard(e.to_string()),
            SolveError::Model(m) => m.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<DistillError> for CliError {
    fn from(e: DistillError) -> Self {
        match e {
            DistillError::Diverged { .. } => CliError::Diverged(e.to_string()),
            DistillError::Io(source) => CliError::Io { path: PathBuf::new(), source },
            other => CliError::Config(other.to_string()),
        }
    }
}
