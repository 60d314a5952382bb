use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes of the `liefield` binary.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const SCHEMA: i32 = 3;
    pub const UNKNOWN_KIND: i32 = 4;
    pub const IO: i32 = 5;
    pub const NUMERICAL: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("unknown scenario kind `{0}` (see `liefield list`)")]
    UnknownKind(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(#[from] liefield_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Schema(_) => exit::SCHEMA,
            CliError::UnknownKind(_) => exit::UNKNOWN_KIND,
            CliError::Io { .. } => exit::IO,
            CliError::Numerical(_) => exit::NUMERICAL,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn schema(msg: impl Into<String>) -> Self {
        CliError::Schema(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
