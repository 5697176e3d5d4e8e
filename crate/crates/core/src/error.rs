use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("structural error at byte {offset}: {message}")]
    Structure { offset: u64, message: String },

    #[error("duplicate document id `{0}`")]
    DuplicateDoc(String),

    #[error("index file version {found} is not supported (expected {expected})")]
    IndexVersion { found: u32, expected: u32 },

    #[error("corrupt index file: {0}")]
    CorruptIndex(String),

    #[error("invalid grade {0}; expected 0, 0.5 or 1")]
    InvalidGrade(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no index loaded for mode `{0}`")]
    MissingMode(String),

    #[error("invalid rule: {0}")]
    InvalidRule(String),

    #[error("{failed} of {total} records failed to parse; aborting ingest")]
    TooManyFailures { failed: usize, total: usize },

    #[error("unknown {kind} `{id}`")]
    NotFound { kind: &'static str, id: String },

    #[error("conflicting write: {0}")]
    Conflict(String),

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}
