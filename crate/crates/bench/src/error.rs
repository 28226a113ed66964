use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] hullcache::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{method} disagrees with the oracle at hull size {hull_size}: {detail}")]
    OracleMismatch {
        method: String,
        hull_size: usize,
        detail: String,
    },
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
