use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("{what} out of domain: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("window [{offset}, {offset}+{len}) out of range for length {available}")]
    WindowOutOfRange {
        offset: usize,
        len: usize,
        available: usize,
    },

    #[error("window code has no entry for window {window}")]
    WindowNotCoded { window: String },

    #[error("weights differ between partitions at atom {index}")]
    WeightMismatch { index: usize },

    #[error("size limit exceeded: {detail}")]
    Size { detail: String },

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        what,
        detail: detail.into(),
    }
}
