use std::path::PathBuf;

use hsp_core::Error as CoreError;

/// Errors surfaced by the command-line tool, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
}

pub mod exit_code {
    pub const OTHER: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const DIMENSION: i32 = 4;
    pub const NUMERICAL: i32 = 5;
    pub const IO: i32 = 6;
    pub const UNSUPPORTED: i32 = 7;
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use exit_code::*;
        match self {
            CliError::Parse { .. } | CliError::Format { .. } => PARSE,
            CliError::Config(_) => CONFIG,
            CliError::Dimension(_) => DIMENSION,
            CliError::Io { .. } => IO,
            CliError::Core(e) => match e.root() {
                CoreError::Config(_) => CONFIG,
                CoreError::Shape(_) | CoreError::IndexOutOfRange { .. } => DIMENSION,
                CoreError::InvalidDataset(_) => PARSE,
                CoreError::Domain(_) | CoreError::NotPositiveDefinite | CoreError::Singular { .. } => NUMERICAL,
                CoreError::Unsupported(_) => UNSUPPORTED,
                CoreError::AtIteration { .. } => OTHER,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
