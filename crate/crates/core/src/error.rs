use thiserror::Error;

/// Errors produced by the topology, spectral, and model pipelines.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("non-square input: {0}")]
    NonSquare(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("asymmetric input: max |M - M^T| = {max_dev:.3e} exceeds tolerance {tol:.1e}")]
    Asymmetric { max_dev: f64, tol: f64 },

    #[error("quantile must be in (0, 1], got {0}")]
    InvalidQuantile(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not symmetric: max |M - M^T| = {0:.3e}")]
    NotSymmetric(f64),

    #[error("eigensolver did not converge: {n}x{n} matrix, off-diagonal residual {residual:.3e}")]
    EigenNonConvergence { n: usize, residual: f64 },

    #[error("inconsistent tree decomposition: cycle subgraph has nullity {nullity}, expected 1")]
    BadNullity { nullity: usize },

    #[error("graph has no cycles: {0}")]
    NoCycles(String),

    #[error("bad file format: {0}")]
    Format(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
