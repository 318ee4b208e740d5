use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state {state} has infinite mean duration")]
    InfiniteDuration { state: usize },

    /// A measured quantity implies a correlation outside `[0, 1)`.
    #[error("inconsistent measurement: correlation evaluates to {value}")]
    InconsistentMeasurement { value: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("truncated frame at byte offset {offset}")]
    TruncatedFrame { offset: u64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown format tag `{0}`")]
    UnknownFormat(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("cannot form {k} clusters from {distinct} distinct values")]
    DegenerateClusters { k: usize, distinct: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("encoder setup failed: {0}")]
    EncodingSetup(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
