use thiserror::Error;

/// Errors raised by tensor-train construction, arithmetic and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {context}: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        context: &'static str,
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("index {index:?} out of range for shape {shape:?}")]
    IndexOutOfRange { index: Vec<usize>, shape: Vec<usize> },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid tensor train: {0}")]
    Invalid(#[from] crate::tt::InvalidTt),

    #[error("{what} has {size} entries, above the guard of {limit}")]
    GuardExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("rank {rank} exceeds the hard rank cap {cap} ({context})")]
    RankCapExceeded {
        rank: usize,
        cap: usize,
        context: &'static str,
    },

    #[error("mode size {size} is not a power of {base}")]
    NotPowerOfBase { size: usize, base: usize },

    #[error("inconsistent digit grouping: {0}")]
    Grouping(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("Newton iteration diverged: {0}")]
    Divergence(String),

    #[error("coefficient is not uniformly elliptic: minimum {min:e} on the grid")]
    Ellipticity { min: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed tensor file: {0}")]
    Format(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(err: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(err.to_string())
    }
}

impl From<ndarray::ShapeError> for Error {
    fn from(err: ndarray::ShapeError) -> Self {
        Error::Linalg(err.to_string())
    }
}
