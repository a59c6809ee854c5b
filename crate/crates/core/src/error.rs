use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus contains no sentences")]
    EmptyCorpus,

    #[error("evaluation set is empty")]
    EmptyEvalSet,

    #[error("pair dataset is empty")]
    EmptyDataset,

    #[error("length mismatch: {what} has {found} items, expected {expected}")]
    LengthMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("edit script does not apply: {0}")]
    InvalidEdit(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("corrupt model file: {0}")]
    CorruptModelFile(String),

    #[error("scorer unavailable: {0}")]
    ScorerUnavailable(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors that come from a remote scorer, fixer or breaker rather than
    /// from local data.
    pub fn is_remote(&self) -> bool {
        matches!(self, Error::ScorerUnavailable(_) | Error::Protocol(_))
    }
}
