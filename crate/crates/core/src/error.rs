use thiserror::Error;

/// Errors raised by model construction, statistics and design routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degenerate signal: diagonal entry {index} of the received covariance is {value}")]
    DegenerateSignal { index: usize, value: f64 },

    #[error("arcsin argument {value} at ({row}, {col}) exceeds unit magnitude")]
    Conditioning { row: usize, col: usize, value: f64 },

    #[error("selection gives a singular reduced covariance")]
    DegenerateSelection,

    #[error("matrix is not positive definite (min eigenvalue {0})")]
    NotPositiveDefinite(f64),

    #[error("exhaustive search too large: n = {n}, m = {m}")]
    SearchTooLarge { n: usize, m: usize },

    #[error("sampling pattern collision at column {0}")]
    PatternCollision(usize),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
