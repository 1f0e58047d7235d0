use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("index ({row}, {col}) out of range for a {n}x{n} matrix")]
    IndexOutOfRange { row: usize, col: usize, n: usize },

    #[error("segments {0} and {1} have coincident centers")]
    CoincidentCenters(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dense size limit exceeded: N = {n} > {limit}")]
    DenseLimit { n: usize, limit: usize },

    #[error("rank cap {cap} exceeded while compressing rows {rows:?} x cols {cols:?} at level {level}")]
    RankCapExceeded {
        cap: usize,
        level: usize,
        rows: (usize, usize),
        cols: (usize, usize),
    },

    #[error("singular diagonal entry at index {0}")]
    SingularDiagonal(usize),

    #[error("matrix is numerically singular (pivot {0})")]
    Singular(usize),

    #[error("Krylov breakdown after {iterations} operator applications: {reason}")]
    Breakdown { iterations: usize, reason: String },

    #[error("eigenvalue iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
