use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report. Each variant maps onto one
/// process exit code through [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("leading minor of order {order} is numerically singular (pivot {pivot:.3e}, threshold {threshold:.3e})")]
    SingularMinor {
        order: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("point {point} lies within {eps:e} of {what} {other}")]
    PoleProximity {
        point: Complex64,
        other: Complex64,
        what: &'static str,
        eps: f64,
    },

    #[error("index {index} outside truncation T = {trunc}")]
    Truncation { index: i64, trunc: usize },

    #[error("outside the convergence region: {0}")]
    Region(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// 2 parse/validation, 3 numerical precondition, 4 budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Invalid(_) | Error::Io(_) => 2,
            Error::NonFinite(_)
            | Error::SingularMinor { .. }
            | Error::PoleProximity { .. }
            | Error::Truncation { .. }
            | Error::Region(_)
            | Error::Degenerate(_) => 3,
            Error::Budget(_) => 4,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
