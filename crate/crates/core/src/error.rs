use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("malformed convolution: {0}")]
    MalformedConvolution(String),
    #[error("track index {index} out of range for {tracks} tracks")]
    TrackOutOfRange { index: usize, tracks: usize },
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),
    #[error("unknown letter: {0}")]
    UnknownLetter(String),
    #[error("decode error: {0}")]
    Decode(String),
    #[error("inconsistent coset table: {0}")]
    InconsistentCosets(String),
    #[error("cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded { what: String, needed: u128, cap: u128 },
    #[error("unbound relation `{0}`")]
    UnboundRelation(String),
    #[error("arity mismatch for `{name}`: expected {expected}, got {got}")]
    ArityMismatch { name: String, expected: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
