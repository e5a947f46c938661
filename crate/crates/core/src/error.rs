use thiserror::Error;

/// Errors raised by the bound assembly, the special functions and the
/// verification kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// A hypothesis of a bound does not hold, e.g. `t > R^2/8`.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("cutoff has no sup-norm M_{index} (smoothness order {available})")]
    MissingSupNorm { index: usize, available: usize },

    #[error("{routine} did not converge: {detail}")]
    NonConvergence { routine: &'static str, detail: String },

    /// Two independent representations of the same kernel disagree.
    #[error("kernel representations disagree: images {images:e} vs eigen-series {eigen:e}")]
    RepresentationMismatch { images: f64, eigen: f64 },

    /// The spectrum table cannot certify the trace at this time.
    #[error("t = {t} is below the reliable range of the spectrum table (lambda_max = {lambda_max}); rebuild with a larger lambda_max")]
    TraceRange { t: f64, lambda_max: f64 },

    #[error("trace bracket width {width:e} exceeds tolerance {tol:e}")]
    BracketTooWide { width: f64, tol: f64 },

    #[error("truncation tolerance {tol:e} not met: {detail}")]
    Truncation { tol: f64, detail: String },

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    /// Whether the error comes from a numerical tolerance that could not be
    /// met, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::RepresentationMismatch { .. }
                | Error::TraceRange { .. }
                | Error::BracketTooWide { .. }
                | Error::Truncation { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
