//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong across the simulation and analysis layers.
///
/// Variants split into two broad families: *validation* errors (a caller asked
/// for something outside the supported domain) and *numerical* errors (the
/// computation itself could not be completed to the required accuracy). The
/// CLI maps the families to distinct exit codes.
#[derive(Debug, Error)]
pub enum QrwsError {
    /// Register size outside the supported range.
    #[error("register size m = {m} is out of range (need {min} <= m <= {max})")]
    RegisterSize { m: usize, min: usize, max: usize },

    /// Marked vertex index does not address a hypercube node.
    #[error("marked vertex {marked} is out of range for m = {m} (need index < {size})")]
    MarkedVertex { marked: usize, m: usize, size: usize },

    /// Unrecognized name for a phase-dependence law.
    #[error("unknown dependence law `{0}` (expected const, linear, nl-fixed or nl-ml)")]
    UnknownLaw(String),

    /// The machine-learned law needs a per-size coefficient that was not
    /// supplied.
    #[error("no alpha coefficient configured for m = {m}")]
    MissingAlpha { m: usize },

    /// Hamming shell order larger than the register size.
    #[error("shell order {order} is out of range for m = {m}")]
    ShellOrder { order: usize, m: usize },

    /// A probability distribution failed its normalization check.
    #[error(
        "distribution is not normalized: total probability {total} deviates \
         from 1 by more than {tolerance}"
    )]
    NotNormalized { total: f64, tolerance: f64 },

    /// A probability curve violates a structural requirement (ordering,
    /// uniform spacing, minimum length, ...).
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    /// Catch-all for argument validation with a human-readable reason.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The regression pipeline did not converge or produced an unusable
    /// parameter set.
    #[error("fit failed: {0}")]
    FitFailure(String),

    /// A stability window is narrower than one grid step, so integrating over
    /// it would be meaningless.
    #[error("stability window epsilon = {epsilon} is below the grid resolution {step}")]
    InsufficientResolution { epsilon: f64, step: f64 },
}

impl QrwsError {
    /// `true` for errors caused by out-of-domain inputs rather than by the
    /// numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            QrwsError::RegisterSize { .. }
                | QrwsError::MarkedVertex { .. }
                | QrwsError::UnknownLaw(_)
                | QrwsError::MissingAlpha { .. }
                | QrwsError::ShellOrder { .. }
                | QrwsError::InvalidParameter { .. }
        )
    }
}
