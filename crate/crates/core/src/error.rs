use thiserror::Error;

use crate::estimation::DiagnosticLine;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alpha must be > 0 (got {0})")]
    InvalidAlpha(f64),
    #[error("p must be in (0, 1) (got {0})")]
    InvalidP(f64),
    #[error("sigma must be > 0 (got {0})")]
    InvalidSigma(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("input is not a normalized probability sequence (sum = {0})")]
    NotNormalized(f64),
    #[error("sample is degenerate: {0}")]
    DegenerateSample(String),
    #[error("method not applicable: {0}")]
    MethodInapplicable(String),
    #[error("estimates outside the parameter space: {0}")]
    InconsistentEstimate(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("diagnostic line has non-positive slope b = {}; implies p >= 1", .0.slope_b)]
    InconsistentFit(Box<DiagnosticLine>),
}

impl Error {
    /// True for errors that mean "this estimator does not apply to this
    /// sample" rather than "the caller passed bad arguments".
    pub fn is_method_inapplicable(&self) -> bool {
        matches!(
            self,
            Error::MethodInapplicable(_)
                | Error::InconsistentEstimate(_)
                | Error::InsufficientData(_)
                | Error::InconsistentFit(_)
                | Error::DegenerateSample(_)
        )
    }
}
