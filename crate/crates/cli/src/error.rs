use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;
pub const EXIT_ACCEPTANCE: i32 = 4;
/// I/O and other environment failures.
pub const EXIT_IO: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid parameter '{name}': {reason}")]
    Validation { name: String, reason: String },

    #[error("{path}:{line}: {reason}")]
    Parse { path: PathBuf, line: usize, reason: String },

    #[error(transparent)]
    Core(#[from] cslab_core::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },

    #[error("{0}")]
    Csv(String),

    #[error("acceptance failure: {0}")]
    Acceptance(String),
}

impl CliError {
    pub fn validation(name: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Validation { name: name.into(), reason: reason.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } | CliError::Parse { .. } => EXIT_VALIDATION,
            CliError::Core(cslab_core::Error::Blowup { .. }) => EXIT_BLOWUP,
            CliError::Core(cslab_core::Error::Usage(_) | cslab_core::Error::ConstraintViolation { .. }) => {
                EXIT_VALIDATION
            }
            CliError::Core(_) => EXIT_IO,
            CliError::Acceptance(_) => EXIT_ACCEPTANCE,
            CliError::Io { .. } | CliError::Json { .. } | CliError::Csv(_) => EXIT_IO,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
