use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("coin dimension must be even and positive, got {0}")]
    OddDimension(usize),

    #[error("malformed matrix file: {0}")]
    MalformedHeader(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("density matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("negative probability {value:.3e} at site {site}")]
    NegativeProbability { site: usize, value: f64 },

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("run interrupted after the checkpoint at t = {0}")]
    Interrupted(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid config at `{path}`: {message}")]
    InvalidConfig { path: String, message: String },

    #[error("unknown figure preset `{0}`")]
    UnknownPreset(String),

    #[error("output directory {0} already exists (use --force to overwrite)")]
    OutputExists(PathBuf),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Whether the error signals a numerical guard rather than bad input.
    pub fn is_numeric_guard(&self) -> bool {
        matches!(self, Error::NegativeProbability { .. } | Error::NotPositive { .. } | Error::SizeGuard(_))
    }
}
