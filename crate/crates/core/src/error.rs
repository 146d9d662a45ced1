use thiserror::Error;

/// Errors raised by the simulation and bound routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The shifted-exponential input cannot meet the power constraint:
    /// `lambda = snr * delta - delta^-t` is not positive.
    #[error("infeasible power allocation: lambda = {lambda} <= 0 (snr = {snr}, delta = {delta}, t = {t})")]
    InfeasiblePower {
        lambda: f64,
        snr: f64,
        delta: f64,
        t: f64,
    },

    #[error("no valid negative-moment bound: {0}")]
    NoValidBound(String),

    #[error("phase undefined: output sample {index} is exactly zero")]
    UndefinedPhase { index: usize },

    #[error("symbol index {index} out of range (frame has {len} symbols)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("numeric failure at v = {v}: {reason}")]
    NumericFailure { v: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
