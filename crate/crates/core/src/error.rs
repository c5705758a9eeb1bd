use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: expected {expected_n} points on [-{expected_l}, {expected_l}), got {got_n} points on [-{got_l}, {got_l})")]
    GridMismatch {
        expected_n: usize,
        expected_l: f64,
        got_n: usize,
        got_l: f64,
    },

    #[error("length mismatch: grid has {expected} points, values have {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value in {context} at index {index}")]
    NonFinite { context: String, index: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("missing parameter `{0}`")]
    MissingParameter(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("time {0} is not a checkpoint of this trajectory")]
    NotCheckpointed(f64),

    #[error("boundary contamination: {0}")]
    BoundaryContamination(String),

    #[error("CFL violation at step {step}: dt = {dt} exceeds limit {limit}")]
    Cfl { step: usize, dt: f64, limit: f64 },

    #[error("numerical abort at step {step} (t = {t}): non-finite {field}")]
    NumericalAbort { step: usize, t: f64, field: String },

    #[error("hypothesis unmet: {0}")]
    Hypothesis(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
