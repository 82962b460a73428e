use std::io;

/// Errors produced by the front-end library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    /// WAV container problems: bad magic, unsupported format, truncation.
    #[error("wav: {0}")]
    Wav(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("out of bounds: {0}")]
    OutOfBounds(String),
}

pub type Result<T> = std::result::Result<T, Error>;
