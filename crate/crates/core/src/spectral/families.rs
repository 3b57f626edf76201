//! Constructors for the state families that illustrate and saturate the bounds.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{SpectralState, StateError, NORMALIZATION_TOL};

fn check_positive(name: &str, value: f64) -> Result<(), StateError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(StateError::InvalidParameter(format!(
            "{name} must be finite and positive, got {value}"
        )))
    }
}

/// Four-level doublet state
/// `a/√2 (|0⟩ + |ε⟩) + b/√2 (|nε⟩ + |(n+1)ε⟩)` with `b = λ / (√2 n^{1/4})`
/// and `a = √(1 − |b|²)` real.
///
/// Levels with zero amplitude are dropped (`λ = 0` or `|b| = 1`); the ground
/// energy stays at 0 either way.
pub fn make_doublet_state(n: u64, lambda: Complex64, epsilon: f64, hbar: f64) -> Result<SpectralState, StateError> {
    if n < 2 {
        return Err(StateError::InvalidParameter(format!("n must be at least 2, got {n}")));
    }
    check_positive("epsilon", epsilon)?;
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(StateError::InvalidParameter("lambda must be finite".into()));
    }
    let nf = n as f64;
    let b_sq = lambda.norm_sqr() / (2.0 * nf.sqrt());
    if b_sq > 1.0 {
        return Err(StateError::InvalidParameter(format!(
            "|b|^2 = |lambda|^2 / (2 sqrt(n)) = {b_sq} exceeds 1"
        )));
    }
    let b = if b_sq > 0.0 {
        lambda / lambda.norm() * b_sq.sqrt()
    } else {
        Complex64::new(0.0, 0.0)
    };
    let a = Complex64::new((1.0 - b_sq).sqrt(), 0.0);
    let levels = [
        (0.0, a * FRAC_1_SQRT_2),
        (epsilon, a * FRAC_1_SQRT_2),
        (nf * epsilon, b * FRAC_1_SQRT_2),
        ((nf + 1.0) * epsilon, b * FRAC_1_SQRT_2),
    ];
    SpectralState::with_params(
        levels.into_iter().filter(|(_, c)| *c != Complex64::new(0.0, 0.0)),
        hbar,
        Some(0.0),
    )
}

/// Generalized doublet state `Σ_n a_n/√2 (|E_n⟩ + |E_n + ε⟩)`.
///
/// The ground energy is the smallest `E_n`. All `2N` energies must be
/// distinct, otherwise the doublets are ambiguous.
pub fn make_paired_state(pairs: &[(f64, Complex64)], epsilon: f64, hbar: f64) -> Result<SpectralState, StateError> {
    check_positive("epsilon", epsilon)?;
    if pairs.is_empty() {
        return Err(StateError::Empty);
    }
    for (index, &(e, a)) in pairs.iter().enumerate() {
        if !(e.is_finite() && a.re.is_finite() && a.im.is_finite()) {
            return Err(StateError::NonFinite { index });
        }
        if e < 0.0 {
            return Err(StateError::InvalidParameter(format!("pair energy {e} is negative")));
        }
    }
    let norm = crate::numerics::compensated_sum(pairs.iter().map(|p| p.1.norm_sqr()));
    if (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(StateError::NotNormalized { norm });
    }

    let mut energies: Vec<f64> = pairs.iter().flat_map(|&(e, _)| [e, e + epsilon]).collect();
    energies.sort_by(f64::total_cmp);
    if let Some(w) = energies.windows(2).find(|w| w[0] == w[1]) {
        return Err(StateError::OverlappingEnergies(w[0]));
    }

    let ground = pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let levels = pairs
        .iter()
        .filter(|(_, a)| *a != Complex64::new(0.0, 0.0))
        .flat_map(|&(e, a)| [(e, a * FRAC_1_SQRT_2), (e + epsilon, a * FRAC_1_SQRT_2)]);
    SpectralState::with_params(levels, hbar, Some(ground))
}

/// Equal-weight two-level state `(e^{iφ₀}|e₀⟩ + e^{iφ₁}|e₁⟩)/√2`, the only
/// kind of state that saturates the α-family.
pub fn make_intelligent_state(
    e0: f64,
    e1: f64,
    phase0: f64,
    phase1: f64,
    hbar: f64,
) -> Result<SpectralState, StateError> {
    if !(e0.is_finite() && e1.is_finite() && e1 > e0) {
        return Err(StateError::InvalidParameter(format!(
            "need e1 > e0, got e0={e0}, e1={e1}"
        )));
    }
    SpectralState::with_params(
        [
            (e0, Complex64::from_polar(FRAC_1_SQRT_2, phase0)),
            (e1, Complex64::from_polar(FRAC_1_SQRT_2, phase1)),
        ],
        hbar,
        Some(e0),
    )
}
