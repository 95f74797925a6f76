use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric argument is outside the domain of the operation.
    #[error("domain error in `{param}`: {reason}")]
    Domain { param: &'static str, reason: String },

    /// A structural argument (schedule, table, count) is unusable.
    #[error("invalid argument `{param}`: {reason}")]
    Argument { param: &'static str, reason: String },

    /// The requested series is infinite; `eps` is on or above the critical threshold.
    #[error("divergent series: eps = {eps} is not below the critical threshold {threshold}")]
    Divergent { eps: f64, threshold: f64 },

    /// A numerical routine failed to reach its target accuracy.
    #[error("numerical failure in {routine}: {reason}")]
    Numerical {
        routine: &'static str,
        reason: String,
    },
}

impl Error {
    pub(crate) fn domain(param: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            param,
            reason: reason.into(),
        }
    }

    pub(crate) fn argument(param: &'static str, reason: impl Into<String>) -> Self {
        Error::Argument {
            param,
            reason: reason.into(),
        }
    }

    /// Name of the offending parameter, if the error is tied to one.
    pub fn param(&self) -> Option<&'static str> {
        match self {
            Error::Domain { param, .. } | Error::Argument { param, .. } => Some(param),
            Error::Divergent { .. } => Some("eps"),
            Error::Numerical { .. } => None,
        }
    }
}
