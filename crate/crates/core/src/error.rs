use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("tape already consumed by a backward sweep")]
    TapeConsumed,

    #[error("non-positive deformation determinant {0}")]
    NonPositiveDeterminant(f64),

    #[error("invariant triplet ({i1}, {i2}, {j}) admits no real non-negative spectrum")]
    NoSpectrum { i1: f64, i2: f64, j: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("structural error: {0}")]
    Structure(String),

    #[error("newton solve did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("element {element} inverted (det F = {det:e})")]
    ElementInverted { element: usize, det: f64 },

    #[error("singular matrix at pivot {0}")]
    Singular(usize),

    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
