use alloc::string::String;

/// Errors raised by samplers, estimators and oracles.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    /// No base station of any tier lies in the observation window.
    #[error("no serving base station in the observation window")]
    NoCoverage,
    #[error("QR iteration did not converge for a {0}x{0} matrix")]
    NoConvergence(usize),
    #[error("quadrature did not reach tolerance (estimate {value}, error {error})")]
    Quadrature { value: f64, error: f64 },
    #[error(
        "premium calibration failed: ruin {ruin_at_max} at premium rate {max_premium} \
         still exceeds target {target}"
    )]
    Calibration {
        target: f64,
        max_premium: f64,
        ruin_at_max: f64,
    },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
