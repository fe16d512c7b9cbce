use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("mesh file {path}, line {line}: {message}")]
    MeshFormat {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("boundary edge ({0}, {1}) is not covered by any tag rule")]
    UncoveredBoundaryEdge(usize, usize),

    #[error("interface: {0}")]
    Interface(String),

    #[error("unknown boundary tag `{0}`")]
    UnknownTag(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is singular (pivot {pivot} at step {step})")]
    Singular { step: usize, pivot: f64 },

    #[error("matrix is not positive definite (pivot {pivot} at step {step})")]
    NotPositiveDefinite { step: usize, pivot: f64 },

    #[error("dense eigenvalue problem of size {size} exceeds the cap {cap}")]
    DenseCapExceeded { size: usize, cap: usize },

    #[error("solver breakdown: {0}")]
    Breakdown(String),

    #[error("point ({0}, {1}) lies outside the envelope")]
    OutsideEnvelope(f64, f64),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
