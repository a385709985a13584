use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("field shape mismatch: {0}")]
    Shape(String),
    #[error("angle θ = {theta} is excluded: |sin θ cos θ| = {value:e} is below {threshold:e}")]
    DegenerateAngle { theta: f64, value: f64, threshold: f64 },
    #[error("shells: {0}")]
    Shells(String),
    #[error("Poisson solve did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("invalid source: {0}")]
    Source(String),
    #[error("manufactured field: {0}")]
    Manufactured(String),
    #[error("snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
