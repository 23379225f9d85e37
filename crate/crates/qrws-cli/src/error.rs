use std::path::PathBuf;

use qrws::QrwsError;

/// Top-level failure type; every variant maps onto one of the documented
/// exit codes (0 success, 1 validation, 2 numerical, 3 missing artifact).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Qrws(#[from] QrwsError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: row {row}: {message}")]
    Schema {
        path: PathBuf,
        row: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Artifact { path: PathBuf, message: String },
    #[error("missing artifact {path} (run `qrws {producer}` first)")]
    MissingArtifact { path: PathBuf, producer: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Qrws(e) if e.is_validation() => 1,
            CliError::Qrws(_) => 2,
            CliError::Config(_) | CliError::Schema { .. } | CliError::Artifact { .. } => 1,
            CliError::MissingArtifact { .. } => 3,
            CliError::Io(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
