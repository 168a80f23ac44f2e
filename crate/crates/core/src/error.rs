use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller broke an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),
    /// The scenario document does not match the schema.
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    /// The scenario is well formed but violates a model assumption.
    #[error("model violation: {0}")]
    Model(String),
    /// An algorithm needs a sensing capability the run does not grant.
    #[error("capability error: {0}")]
    Capability(String),
    /// A movement decision fell outside the legal truncation interval.
    #[error("adversary contract violated: {0}")]
    AdversaryContract(String),
    #[error("angle sequence undefined: fewer than three non-co-radial points")]
    SequenceUndefined,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}
