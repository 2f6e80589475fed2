use thiserror::Error;

/// Errors raised by operator builders, spectral checks and graph routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid degree: {0}")]
    InvalidDegree(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("insufficient data: kernel values needed up to index {needed}, available up to {available}")]
    InsufficientData { needed: usize, available: usize },

    #[error("dimension too large: {rows} rows exceeds cap {cap}")]
    DimensionTooLarge { rows: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (relative defect {defect:.3e})")]
    NotSymmetric { defect: f64 },

    #[error("operator is not positive (min eigenvalue {min_eigenvalue:.6e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("tail limits violated: |l1| = {} > l0 = {l0}", l1.abs())]
    LimitsViolated { l0: f64, l1: f64 },

    #[error("joint diagonalization failed (commutator residual {residual:.3e})")]
    JointDiagonalizationFailed { residual: f64 },

    #[error("spectral value {value} lies outside [-1, 1]")]
    SpectrumOutOfRange { value: f64 },

    #[error("graph too large: {vertices} vertices exceeds cap {cap}")]
    TooLarge { vertices: usize, cap: usize },

    #[error("graph is not median")]
    NotMedian,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("symmetric eigensolver did not converge")]
    EigenSolverFailed,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
