use thiserror::Error;

/// Errors produced by hull construction, layout building, and queries.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}
