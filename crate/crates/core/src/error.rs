use thiserror::Error;

use crate::eigen::EigenPair;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("domain error: point {point:?} is outside {domain}")]
    Domain { point: Vec<f64>, domain: String },

    #[error("convergence error after {iterations} iterations: {reason}")]
    Convergence {
        iterations: usize,
        reason: String,
        /// Last iterate, when one exists.
        last: Option<Box<EigenPair>>,
    },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("identity violation: {0}")]
    IdentityViolation(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("positivity violation on path {path}: wealth {wealth} at t = {time}")]
    PositivityViolation { path: u64, time: f64, wealth: f64 },

    #[error("saddle violation in cell ({strategy}, {scenario}): {detail}")]
    SaddleViolation {
        strategy: String,
        scenario: String,
        detail: String,
    },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable tag, used in manifests.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input(_) => "input-error",
            Error::Domain { .. } => "domain-error",
            Error::Convergence { .. } => "convergence-error",
            Error::Resolution(_) => "resolution-error",
            Error::IdentityViolation(_) => "identity-violation",
            Error::Evaluation(_) => "evaluation-error",
            Error::PositivityViolation { .. } => "positivity-violation",
            Error::SaddleViolation { .. } => "saddle-violation",
            Error::Config { .. } => "config-error",
            Error::Internal(_) => "internal-error",
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => "io-error",
        }
    }
}
