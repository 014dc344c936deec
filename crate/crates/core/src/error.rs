use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("mode error: {0}")]
    Mode(String),
    #[error("search limit reached: {0}")]
    Limit(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("model error: {0}")]
    Model(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
