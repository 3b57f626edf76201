use std::f64::consts::PI;
use std::fmt;

use super::{check_alpha, BoundError, EnergyDistribution};
use crate::numerics::compensated_sum;

/// Which speed limit a [`BoundReport`] carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundKind {
    MandelstamTamm,
    MargolusLevitin,
    Alpha(f64),
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundKind::MandelstamTamm => write!(f, "MT"),
            BoundKind::MargolusLevitin => write!(f, "ML"),
            BoundKind::Alpha(a) => write!(f, "alpha({a})"),
        }
    }
}

/// A lower bound on the orthogonalization time.
///
/// `value` is `+inf` exactly when `moment_used` is zero, i.e. the state can
/// never reach an orthogonal state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub value: f64,
    /// `ΔE` for Mandelstam–Tamm, `⟨E−E₀⟩` for Margolus–Levitin and
    /// `⟨(E−E₀)^α⟩` for the α-family.
    pub moment_used: f64,
}

impl BoundReport {
    pub fn is_infinite(&self) -> bool {
        self.value == f64::INFINITY
    }
}

fn gaps(dist: &EnergyDistribution) -> impl Iterator<Item = (f64, f64)> + '_ {
    let ground = dist.ground_energy();
    dist.points().iter().map(move |&(e, w)| (e - ground, w))
}

fn raw_moment(dist: &EnergyDistribution, alpha: f64) -> f64 {
    compensated_sum(gaps(dist).map(|(g, w)| w * g.powf(alpha)))
}

/// `⟨(E−E₀)^α⟩ = Σ_k |c_k|² (E_k − E₀)^α`.
pub fn moment(state: impl AsRef<EnergyDistribution>, alpha: f64) -> Result<f64, BoundError> {
    check_alpha(alpha)?;
    Ok(raw_moment(state.as_ref(), alpha))
}

/// Energy standard deviation `ΔE`.
///
/// Evaluated as a central second moment about the mean, measured from the
/// lowest populated energy so that a single populated level gives exactly 0.
pub fn dispersion(state: impl AsRef<EnergyDistribution>) -> f64 {
    let dist = state.as_ref();
    let Some(origin) = dist.min_energy() else {
        return 0.0;
    };
    let mean = compensated_sum(dist.points().iter().map(|&(e, w)| w * (e - origin)));
    let var = compensated_sum(dist.points().iter().map(|&(e, w)| {
        let d = (e - origin) - mean;
        w * d * d
    }));
    var.max(0.0).sqrt()
}

/// Mandelstam–Tamm: `πħ / (2ΔE)`.
pub fn mt_bound(state: impl AsRef<EnergyDistribution>) -> BoundReport {
    let dist = state.as_ref();
    let spread = dispersion(dist);
    let value = if spread == 0.0 {
        f64::INFINITY
    } else {
        PI * dist.hbar() / (2.0 * spread)
    };
    BoundReport {
        kind: BoundKind::MandelstamTamm,
        value,
        moment_used: spread,
    }
}

/// Margolus–Levitin: `πħ / (2⟨E−E₀⟩)`.
///
/// Shares its arithmetic with [`alpha_bound`] at `α = 1`, so the two agree
/// bit for bit.
pub fn ml_bound(state: impl AsRef<EnergyDistribution>) -> BoundReport {
    power_mean_bound(state.as_ref(), 1.0, BoundKind::MargolusLevitin)
}

/// The α-family: `πħ / (2^{1/α} ⟨(E−E₀)^α⟩^{1/α})`.
pub fn alpha_bound(state: impl AsRef<EnergyDistribution>, alpha: f64) -> Result<BoundReport, BoundError> {
    check_alpha(alpha)?;
    Ok(power_mean_bound(state.as_ref(), alpha, BoundKind::Alpha(alpha)))
}

fn power_mean_bound(dist: &EnergyDistribution, alpha: f64, kind: BoundKind) -> BoundReport {
    let m = raw_moment(dist, alpha);
    let value = if m == 0.0 {
        f64::INFINITY
    } else {
        let direct = PI * dist.hbar() / (2.0 * m).powf(1.0 / alpha);
        if direct.is_finite() && direct > 0.0 && m.is_normal() {
            direct
        } else {
            log_space_bound(dist, alpha)
        }
    };
    BoundReport {
        kind,
        value,
        moment_used: m,
    }
}

/// Same bound evaluated through `ln⟨(E−E₀)^α⟩` for moments that overflow or
/// underflow in linear space.
fn log_space_bound(dist: &EnergyDistribution, alpha: f64) -> f64 {
    let logs: Vec<f64> = gaps(dist)
        .filter(|&(g, _)| g > 0.0)
        .map(|(g, w)| w.ln() + alpha * g.ln())
        .collect();
    let Some(top) = logs.iter().copied().reduce(f64::max) else {
        return f64::INFINITY;
    };
    let log_moment = top + compensated_sum(logs.iter().map(|l| (l - top).exp())).ln();
    ((PI * dist.hbar()).ln() - (std::f64::consts::LN_2 + log_moment) / alpha).exp()
}
