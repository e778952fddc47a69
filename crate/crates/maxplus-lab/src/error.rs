use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("value {0} is not a member of the max-plus semifield (NaN or +inf)")]
    NotMaxPlus(f64),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("operation requires a finite function but a -inf entry was found at cell {0}")]
    BottomValue(usize),

    #[error("operation requires a periodic grid")]
    NonPeriodicGrid,

    #[error("CFL condition violated: dt = {dt}, limit = {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("monotonicity bound violated: {0}")]
    MonotonicityBound(String),

    #[error("sampled midpoint test detected a non-convex function: {0}")]
    NonConvex(String),

    #[error("empty sample set")]
    EmptySamples,

    #[error("sample pair with f = g is not allowed (zero denominator)")]
    DegeneratePair,

    #[error("empty control set")]
    EmptyControlSet,

    #[error("time {t} outside the admissible range {what}")]
    TimeOutOfRange { t: f64, what: String },

    #[error("construction refused: {0}")]
    ConstructionRefused(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
