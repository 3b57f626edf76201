//! Lower bounds on the time a quantum state needs to evolve into an
//! orthogonal one, checked against numerically located orthogonalization
//! times.
//!
//! * [`spectral`] – finite-spectrum states, energy moments and the
//!   Mandelstam–Tamm, Margolus–Levitin and α-family bounds.
//! * [`dynamics`] – survival amplitude and first-orthogonalization search.
//! * [`minorant`] – grid verification of the trigonometric inequalities the
//!   bounds are built from.
//! * [`optimizer`] – α sweeps and cross-family comparison reports.
//! * [`mixed`] – density matrices, Uhlmann fidelity and purification.

pub mod dynamics;
pub mod minorant;
pub mod mixed;
pub mod numerics;
pub mod optimizer;
pub mod spectral;

pub use num_complex::Complex64;
