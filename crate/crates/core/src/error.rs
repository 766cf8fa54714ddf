use thiserror::Error;

/// Errors raised anywhere in the moment engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("pole of the gamma function at {0}")]
    Pole(f64),

    #[error("argument outside the supported domain: {0}")]
    Domain(String),

    #[error("{what} did not converge (value {value:e}, error estimate {abs_err:e})")]
    NonConvergence {
        what: String,
        value: f64,
        abs_err: f64,
    },

    #[error("integrand returned a non-finite value at u = {0:e}")]
    InvalidIntegrand(f64),

    #[error("moment does not exist: {0}")]
    Existence(String),

    #[error("unsupported parameter combination: {0}")]
    UnsupportedParam(String),

    #[error("Levy measure carries no tail exponent and numeric probing was inconclusive")]
    UnknownTail,

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("fitted tail exponent {fitted:.4} deviates from the declared {declared:.4}")]
    TailFit { fitted: f64, declared: f64 },

    #[error("density integrates to {0:.12} instead of 1")]
    Normalization(f64),

    #[error("no sampler for {0}")]
    UnsupportedSampler(String),

    #[error("jump law {0} is not closed under convolution")]
    UnsupportedJump(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn existence(msg: impl Into<String>) -> Self {
        Error::Existence(msg.into())
    }
}
