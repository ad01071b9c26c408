use thiserror::Error;

/// Errors raised by the numerical modules.
///
/// `Domain` covers violated preconditions (bad inputs); `Contract` covers
/// numerical post-conditions that failed to hold (truncation leakage,
/// non-PSD matrices), which the CLI maps to a distinct exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("superluminal velocity: |v| = {speed} (must be < 1)")]
    Superluminal { speed: f64 },

    #[error("non-positive mass: {0}")]
    NonPositiveMass(f64),

    #[error("off-shell momentum: p.p = {norm}, expected {expected}")]
    OffShell { norm: f64, expected: f64 },

    #[error("unequal masses: {0} vs {1}")]
    UnequalMass(f64, f64),

    #[error("relative speed {speed} below floor {floor}")]
    BelowFloor { speed: f64, floor: f64 },

    #[error("degenerate pair: p.q = {dot} not above m^2 = {m2}")]
    DegeneratePair { dot: f64, m2: f64 },

    #[error("invalid argument `{name}`: {reason}")]
    Invalid { name: &'static str, reason: String },

    #[error("numerical contract violated: {0}")]
    Contract(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            name,
            reason: reason.into(),
        }
    }

    /// True for post-condition failures as opposed to bad inputs.
    pub fn is_contract(&self) -> bool {
        matches!(self, Error::Contract(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
