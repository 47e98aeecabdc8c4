use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Index file written by an incompatible build.
    #[error("unsupported index format in {path}: {message}")]
    Format { path: PathBuf, message: String },

    /// Index file is truncated or otherwise damaged.
    #[error("corrupt index file {path}: {message}")]
    Corrupt { path: PathBuf, message: String },

    #[error("query has no terms left after analysis: {0:?}")]
    EmptyAnalyzedQuery(String),

    #[error("no trainable vocabulary (no term reaches min_count {min_count})")]
    NoTrainableVocabulary { min_count: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
