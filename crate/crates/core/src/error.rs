use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected n = {expected}, found n = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what}: n = {n} is outside the supported range {min}..={max}")]
    UnsupportedSize {
        what: &'static str,
        n: usize,
        min: usize,
        max: usize,
    },

    #[error("integer overflow in cost arithmetic")]
    Overflow,

    #[error("undefined arithmetic: {0}")]
    Undefined(&'static str),

    #[error("cell ({0},{1}) is infinite")]
    InfiniteCell(usize, usize),

    #[error("invalid tour: {0}")]
    InvalidTour(String),

    #[error("invalid arc set: {0}")]
    InvalidArcs(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
