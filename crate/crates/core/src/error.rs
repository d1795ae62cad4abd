use std::fmt;

use thiserror::Error;

/// Which precondition of the contraction machinery an instance failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EligibilityReason {
    /// `R^s(1) != 0`.
    NotLipschitzZeroAtOne,
    /// `beta * L >= 16/7` (or infinite sensitivity).
    BetaLTooLarge,
    /// The estimate radius exceeds the admissible threshold.
    EpsTooLarge,
}

impl EligibilityReason {
    /// Stable machine-readable code.
    pub fn code(self) -> &'static str {
        match self {
            EligibilityReason::NotLipschitzZeroAtOne => "NOT_LIPSCHITZ_ZERO_AT_ONE",
            EligibilityReason::BetaLTooLarge => "BETA_L_TOO_LARGE",
            EligibilityReason::EpsTooLarge => "EPS_TOO_LARGE",
        }
    }
}

impl fmt::Display for EligibilityReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("range error: {0}")]
    Range(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("capacity exceeded: horizon {horizon} is above the enumeration cap {cap}")]
    Capacity { horizon: usize, cap: usize },

    #[error("ineligible instance ({reason}): {detail}")]
    Eligibility {
        reason: EligibilityReason,
        detail: String,
    },

    #[error("fixed-point iteration did not converge: {0}")]
    Convergence(String),
}

impl Error {
    pub fn eligibility_reason(&self) -> Option<EligibilityReason> {
        match self {
            Error::Eligibility { reason, .. } => Some(*reason),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
