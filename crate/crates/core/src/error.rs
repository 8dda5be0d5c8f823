use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of an operation (inverse of zero,
    /// logarithm of zero, the empty circle `C_0`, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter the construction does not support (wrong characteristic,
    /// field too large, q not of the required form).
    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    /// A structural invariant failed to hold. Indicates a construction bug.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
