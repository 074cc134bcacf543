use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid range: a = {a} exceeds b = {b}")]
    InvalidRange { a: usize, b: usize },

    #[error("regime error: {0}")]
    Regime(String),

    #[error("no positive solution: {0}")]
    NoSolution(String),

    #[error("graph has {vertices} vertices, exact solver cap is {cap}; use the greedy scheduler")]
    SizeLimit { vertices: usize, cap: usize },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
