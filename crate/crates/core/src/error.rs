use thiserror::Error;

/// Errors produced by the simulator and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical or numeric parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A numeric routine failed to produce a valid result.
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// THD requested for a spectrum whose fundamental is zero.
    #[error("THD is undefined for a zero fundamental")]
    UndefinedThd,

    /// Load impedance with R = L = 0.
    #[error("invalid load: R and L are both zero")]
    InvalidLoad,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
