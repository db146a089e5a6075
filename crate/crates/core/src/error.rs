use thiserror::Error;

/// Errors produced by path construction and path operations.
#[derive(Debug, Error)]
pub enum PathError {
    #[error("breakpoint times must start at 0 and strictly increase (offending index {0})")]
    BadBreakpoints(usize),
    #[error("breakpoint {0} has a value of the wrong dimension")]
    BadValueDim(usize),
    #[error("horizon must be positive")]
    BadHorizon,
    #[error("killed_at must lie in (0, horizon]")]
    BadKilledAt,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("anchor mismatch between paths")]
    AnchorMismatch,
    #[error("shift time {t} lies beyond the horizon {horizon}")]
    ShiftBeyondHorizon { t: f64, horizon: f64 },
    #[error("subdivision entries must start at 0 and be nondecreasing (offending index {0})")]
    BadSubdivision(usize),
    #[error("time change knots must start at (0,0) and be strictly increasing in both coordinates")]
    BadTimeChange,
    #[error("no big excursion to shift")]
    NoBigExcursion,
    #[error("excursion sizes must be filled before thinning")]
    MissingSizes,
}

/// Errors produced by serialization and deserialization.
#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json sidecar error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(transparent)]
    Path(#[from] PathError),
}
