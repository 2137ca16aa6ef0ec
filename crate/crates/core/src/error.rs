use thiserror::Error;

/// Errors produced by the h-function pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid h-function: {0}")]
    InvalidH(String),

    #[error("probability {0} is outside [0, 1]")]
    Probability(f64),

    #[error("ln g is not locally integrable: {0}")]
    LogNotIntegrable(String),

    #[error("integrand is not finite ({value}) at node t = {node}")]
    NonFiniteIntegrand { node: f64, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Hilbert transform is not finite at x = {0}")]
    HilbertNonFinite(f64),

    #[error("degenerate trace: {0}")]
    DegenerateTrace(String),

    #[error("unknown catalog id `{id}` (known ids: {known})")]
    UnknownCatalog { id: String, known: String },

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("start point {0} is not strictly inside the traced region")]
    StartOutside(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
