use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("size mismatch: tree has {tree} vertices, point set has {points} points")]
    SizeMismatch { tree: usize, points: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown instance `{0}`")]
    UnknownInstance(String),

    #[error("corrupt asset `{asset}`: {reason}")]
    CorruptAsset { asset: String, reason: String },

    #[error("model does not decode to an embedding: {0}")]
    Decode(String),

    #[error("engines disagree on `{instance}`: search says {search}, SAT says {sat}")]
    EngineDisagreement { instance: String, search: bool, sat: bool },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}
