//! Mixed states: density matrices in the energy eigenbasis, Uhlmann
//! fidelity, purification, and the fidelity inequality
//! `F(ρ, ρ(t)) ≥ |⟨χ|χ(t)⟩|²` that carries every moment-based bound over
//! from pure to mixed states.

mod density;
mod linalg;

pub use density::{
    fidelity, mixed_moment, mixed_orthogonalization, purified_survival_amplitude, purify, uhlmann_check, DensityMatrix,
    MixedPassage, Purification, UhlmannCheck, MAX_DIM,
};
pub use linalg::{hermitian_eigendecomposition, psd_sqrt, CMatrix, HermitianEigen, HERMITIAN_TOL, PSD_TOL};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MixedError {
    #[error("expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("density matrices live on different energy spectra")]
    SpectrumMismatch,
    #[error("dimension {0} is outside the supported range 1..={MAX_DIM}")]
    UnsupportedDimension(usize),
    #[error("matrix is not Hermitian (deviation {deviation})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("trace is {0}, expected 1")]
    TraceNotUnit(f64),
    #[error("hbar must be finite and positive, got {0}")]
    InvalidHbar(f64),
    #[error("non-finite energy or entry")]
    NonFinite,
    #[error("energy {energy} lies below the ground energy {ground}")]
    BelowGround { energy: f64, ground: f64 },
    #[error("Jacobi iteration did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error(transparent)]
    Dynamics(#[from] crate::dynamics::DynamicsError),
}
