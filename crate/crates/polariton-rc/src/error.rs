use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A file does not follow the expected byte layout (bad magic, bad header).
    #[error("format error: {0}")]
    Format(String),

    /// A payload is shorter or longer than its header declares.
    #[error("length error: {0}")]
    Length(String),

    /// Well-formed data with invalid content (e.g. a label outside 0..=9).
    #[error("data error: {0}")]
    Data(String),

    /// An argument violates a documented precondition.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The integrator produced a non-finite value.
    #[error("divergence error: {0}")]
    Divergence(String),

    /// An experiment config file could not be parsed.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
