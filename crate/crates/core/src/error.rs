use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown VNF index {index} (pool has {n_vnfs} VNFs)")]
    UnknownVnf { index: usize, n_vnfs: usize },

    #[error("placement target {index} out of range (pool has {k_servers} servers plus the cloud)")]
    TargetOutOfRange { index: usize, k_servers: usize },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("configuration error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("comparison refused: {0}")]
    Mismatch(String),

    #[error("agent failure: {0}")]
    Agent(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
