use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid input at {path}: {msg}")]
    Invalid { path: String, msg: String },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("matrix is not derivative-closed: column {column} has a derivative outside the constant column span")]
    NotDerivativeClosed { column: usize },
    #[error("elimination failed: {0}")]
    Elimination(String),
    #[error("not transverse at the base point: Jacobian rank {rank} < {k}")]
    NonTransverse { rank: usize, k: usize },
    #[error("ambiguous numerical rank (singular value ratio {gap:.3e})")]
    AmbiguousRank { gap: f64 },
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("closure violation: {witness} is required but missing")]
    Closure { witness: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(path: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Invalid { path: path.into(), msg: msg.into() }
}
