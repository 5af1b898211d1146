use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Record {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("passage has an empty term set")]
    EmptyTermSet,

    #[error("detection refers to unknown pair ({doi_a}, {doi_b})")]
    UnknownPair { doi_a: String, doi_b: String },

    #[error("unknown document {0}")]
    UnknownDocument(String),

    #[error("checkpoint mismatch in {path}: {reason}")]
    CheckpointMismatch { path: PathBuf, reason: String },

    #[error("alignment worker failed on pairs {first} .. {last}")]
    WorkerFailed { first: String, last: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
