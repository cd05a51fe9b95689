use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("operation requires two outcomes per setting, scenario has {0}")]
    NotDichotomic(usize),
    #[error("correlators are inconsistent: P({a},{b}|{x},{y}) = {value:e} < 0")]
    InconsistentCorrelators {
        x: usize,
        y: usize,
        a: usize,
        b: usize,
        value: f64,
    },
    #[error("invalid quantum state: {0}")]
    InvalidState(String),
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
    #[error("input is not party-symmetric: {0}")]
    NotSymmetric(String),
    #[error("enumeration of {count} strategies exceeds the limit of {limit}")]
    EnumerationTooLarge { count: f64, limit: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown functional `{0}`")]
    UnknownFunctional(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Sdp(#[from] bellforge_sdp::SdpError),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
