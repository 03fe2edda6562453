use thiserror::Error;

/// Everything that can go wrong while building or analyzing a channel.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("channel has no Kraus operators")]
    EmptyKraus,

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("channel is not trace preserving (residual {residual:.3e})")]
    NotTracePreserving { residual: f64 },

    #[error("channel is not unital (residual {residual:.3e}); multiplicative-domain analysis is restricted to unital channels")]
    NotUnital { residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("subspace is not a unital *-algebra: {0}")]
    NotAnAlgebra(String),

    #[error("ill-conditioned computation: {0}")]
    IllConditioned(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
