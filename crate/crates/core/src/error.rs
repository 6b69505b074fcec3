use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid sector: {0}")]
    InvalidSector(String),

    #[error("orbital index {index} out of range for {n_orbitals} orbitals")]
    OrbitalOutOfRange { index: usize, n_orbitals: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("FCIDUMP line {line}: {message}")]
    Fcidump { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("eigensolver did not converge: residual {residual:e} after {iterations} iterations")]
    EigenNonConvergence { residual: f64, iterations: usize },

    #[error("ansatz parse error at line {line}: {message}")]
    AnsatzParse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dim(expected: usize, found: usize) -> Self {
        Error::DimensionMismatch { expected, found }
    }
}
