use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}, line {line}: {message}")]
    Format { path: PathBuf, line: u64, message: String },

    #[error("{path}, line {line}: {message}")]
    Value { path: PathBuf, line: u64, message: String },

    #[error("{path}: {message}")]
    Json { path: PathBuf, message: String },

    #[error("refusing to write {0}: nothing to write")]
    EmptyOutput(PathBuf),

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] pvbounds::Error),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
