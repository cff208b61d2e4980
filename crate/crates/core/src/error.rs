use thiserror::Error;

/// Errors raised by model construction, measure evaluation and I/O.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("probability {0} outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),

    #[error("moment undefined: {0}")]
    MomentUndefined(String),

    #[error("inadmissible copula: {0}")]
    InadmissibleCopula(String),

    #[error("dimension {dim} unsupported (supported: {supported})")]
    DimensionUnsupported { dim: usize, supported: &'static str },

    #[error("degenerate denominator (numerator {numerator:e}, denominator {denominator:e})")]
    DegenerateDenominator { numerator: f64, denominator: f64 },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("quadrature did not converge: value {value:e}, error estimate {error:e} > tolerance {tolerance:e}")]
    QuadratureNotConverged { value: f64, error: f64, tolerance: f64 },

    #[error("model not samplable: {0}")]
    ModelNotSamplable(String),

    #[error("model unsupported by this evaluator: {0}")]
    UnsupportedModel(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse { row: usize, column: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
