//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dyadic range: j_min = {j_min} must be below j_max = {j_max}")]
    InvalidRange { j_min: i32, j_max: i32 },

    #[error("scale j = {j} outside partition range [{j_min}, {j_max}]")]
    InvalidScale { j: i32, j_min: i32, j_max: i32 },

    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("singular frequency: the symbol is undefined at xi = 0")]
    SingularFrequency,

    #[error("invalid time t = {0}: must be nonnegative")]
    InvalidTime(f64),

    #[error("matrix has non-finite entries")]
    InvalidMatrix,

    #[error("operation requires a {expected} representation")]
    UnsupportedRepresentation { expected: &'static str },

    #[error("time sampling too sparse: {0}")]
    InsufficientSampling(String),

    #[error("undefined ratio: denominator vanishes")]
    UndefinedRatio,

    #[error("degenerate cube range: N = {0} must be at least 2")]
    DegenerateRange(u32),

    #[error("empty admissible support for kernel sampling (j = {0})")]
    EmptySupport(i32),

    #[error("quadrature accuracy: self-estimated error {estimate:.3e} above {budget:.3e}")]
    QuadratureAccuracy { estimate: f64, budget: f64 },

    #[error("step too large: a dyadic block norm moved by {worst:.3}x in the corrector")]
    StepTooLarge { worst: f64 },

    #[error("suspected blow-up at t = {t}: step rejected after {halvings} halvings")]
    BlowUpSuspected { t: f64, halvings: u32 },

    #[error("no admissible existence time above dt = {dt}")]
    TimeResolution { dt: f64 },

    #[error("lattice cannot resolve the data support for N = {n}: needs |xi| <= {needed}, grid reaches {available}")]
    Resolution { n: u32, needed: f64, available: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed field file: {0}")]
    MalformedFile(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid_parameter(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}
