use thiserror::Error;

use crate::graph::VertexCoord;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexCoord),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("singular parameter: {0}")]
    SingularParameter(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
