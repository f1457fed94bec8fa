use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{file}:{line}: {msg}")]
    Parse { file: String, line: usize, msg: String },
    #[error("oracle refuses graph with {vertices} vertices (cap {cap})")]
    OracleCap { vertices: usize, cap: usize },
    #[error("index error: {0}")]
    Index(String),
    #[error("missing index file {0}")]
    MissingIndex(PathBuf),
    #[error("search budget of {0} paths exceeded")]
    Budget(u64),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
