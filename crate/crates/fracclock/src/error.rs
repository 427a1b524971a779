use thiserror::Error;

/// Errors surfaced by solvers, samplers, and parsers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the accepted range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A registered table or cached list is too short for the request.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// Caller-supplied data (samples, evaluators) produced invalid values.
    #[error("input error: {0}")]
    Input(String),

    /// A numerical routine did not reach its tolerance. Carries the value it
    /// did reach and the error it estimates for that value.
    #[error("numeric error: {what} (achieved {achieved:.3e}, requested {requested:.3e})")]
    Numeric {
        what: String,
        value: f64,
        achieved: f64,
        requested: f64,
    },

    /// Configuration rejected with field-level diagnostics.
    #[error("{0}")]
    Config(#[from] crate::config::ConfigError),

    /// Too few usable data points for a statistical conclusion.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A reference distribution failed its own sanity check.
    #[error("reference error: {0}")]
    Reference(String),

    /// A run-level failure (rejection budget exceeded, missing output, ...).
    #[error("run error: {0}")]
    Run(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
