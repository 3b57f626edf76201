//! Finite-spectrum pure states, energy moments and closed-form speed limits.

mod bounds;
mod families;
mod state;

pub use bounds::{alpha_bound, dispersion, ml_bound, moment, mt_bound, BoundKind, BoundReport};
pub use families::{make_doublet_state, make_intelligent_state, make_paired_state};
pub use state::{EnergyDistribution, Level, SpectralState};

use thiserror::Error;

/// Absolute tolerance on `Σ|c|² = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("state has no levels")]
    Empty,
    #[error("hbar must be finite and positive, got {0}")]
    InvalidHbar(f64),
    #[error("level {index} has a non-finite energy or amplitude")]
    NonFinite { index: usize },
    #[error("ground energy must be finite, got {0}")]
    InvalidGround(f64),
    #[error("level energy {energy} lies below the ground energy {ground}")]
    BelowGround { energy: f64, ground: f64 },
    #[error("state is not normalized: sum of |amplitude|^2 = {norm}")]
    NotNormalized { norm: f64 },
    #[error("overlapping doublet energies: {0} appears twice")]
    OverlappingEnergies(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("alpha must be finite and positive, got {0}")]
    InvalidAlpha(f64),
}

pub(crate) fn check_alpha(alpha: f64) -> Result<(), BoundError> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(BoundError::InvalidAlpha(alpha))
    }
}
