use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A line or record of an input file could not be parsed.
    #[error("{context}: record {record}: {message}")]
    Parse {
        context: String,
        record: usize,
        message: String,
    },

    /// A parsed record violates a domain invariant.
    #[error("record {id}: {message}")]
    InvalidRecord { id: String, message: String },

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("empty knowledge graph")]
    EmptyGraph,

    #[error("anchor not found: {0:?}")]
    AnchorNotFound(String),

    #[error("anchor {anchor:?} still present after masking with {mask_token:?}")]
    MaskCollision { anchor: String, mask_token: String },

    #[error("index format: {0}")]
    IndexFormat(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("zero vector")]
    ZeroVector,

    #[error("missing embeddings for ids: {}", .0.join(", "))]
    MissingEmbeddings(Vec<String>),

    #[error("missing confidences for ids: {}", .0.join(", "))]
    MissingConfidences(Vec<String>),

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

    pub(crate) fn parse(context: impl Into<String>, record: usize, message: impl ToString) -> Self {
        Error::Parse {
            context: context.into(),
            record,
            message: message.to_string(),
        }
    }
}
