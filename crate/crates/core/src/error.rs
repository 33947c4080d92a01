use thiserror::Error;

#[derive(Debug, Error)]
pub enum HullError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point ({x}, {z}) lies outside the hull domain")]
    OutOfDomain { x: f64, z: f64 },

    #[error("objective matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("matrix of order {n} exceeds the limit of {limit}; shrink the grid")]
    TooLarge { n: usize, limit: usize },

    #[error("cannot allocate {bytes} bytes for a {rows} x {cols} matrix")]
    Allocation { rows: usize, cols: usize, bytes: usize },

    #[error("solver did not converge after {iterations} iterations (last residual {last_residual:.3e})")]
    Divergence {
        iterations: usize,
        last_residual: f64,
        trace: Vec<f64>,
    },

    #[error("step size fault: residual grew from {from:.3e} to {to:.3e}; reduce dr1/dr2")]
    StepSizeFault { from: f64, to: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed hull file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HullError {
    pub(crate) fn arg(name: &'static str, reason: impl Into<String>) -> Self {
        HullError::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, HullError>;
