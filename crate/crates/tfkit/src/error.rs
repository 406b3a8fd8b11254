use std::io;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("grid mismatch: {0} vs {1} points")]
    GridMismatch(usize, usize),
    #[error("tile too small for grid: {bins} frequency bins (need at least 4)")]
    Resolution { bins: i64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("stopping time did not terminate: {0}")]
    NonTermination(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
