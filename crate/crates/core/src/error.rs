use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A protocol message arrived in the wrong phase or with the wrong kind.
    #[error("protocol order violation: expected {expected}, got {got}")]
    ProtocolOrder { expected: &'static str, got: String },

    /// A message belongs to a different session.
    #[error("message for session {got} delivered to session {expected}")]
    SessionMismatch { expected: String, got: String },

    /// Bytes or text that do not form a valid protocol message.
    #[error("malformed message: {0}")]
    Decode(String),

    #[error("transcript I/O: {0}")]
    Io(#[from] std::io::Error),

    #[error("transcript JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
