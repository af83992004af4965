use thiserror::Error;

use crate::exprdsl::{EvalError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("singular metric at {point:?}: |det g| = {det:e}")]
    SingularMetric { point: Vec<f64>, det: f64 },
    #[error(
        "signature mismatch at {point:?}: expected {expected}, metric has {positive} positive, \
         {negative} negative and {zero} zero eigenvalues"
    )]
    SignatureMismatch { point: Vec<f64>, expected: String, positive: usize, negative: usize, zero: usize },
    #[error("trajectory left the chart through `{axis}` near t = {exit_time}")]
    LeftDomain { axis: String, exit_time: f64 },
    #[error("coordinate `{axis}` is unbounded; quadrature needs a compact domain")]
    NonCompactDomain { axis: String },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("metric is not in shift-free lapse form: {0}")]
    NotLapseForm(String),
    #[error("{path}: {source}")]
    Expression { path: String, source: ParseError },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("JSON syntax error: {0}")]
    Json(String),
    #[error("analysis `{analysis}` is not applicable: {reason}")]
    NotApplicable { analysis: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Eval(_) | Error::SingularMetric { .. } | Error::LeftDomain { .. } | Error::NotLapseForm(_) => {
                ErrorClass::Numerical
            }
            _ => ErrorClass::Input,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
