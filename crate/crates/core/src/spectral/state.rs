use num_complex::Complex64;

use super::{StateError, NORMALIZATION_TOL};

/// One energy eigenlevel carrying amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub amplitude: Complex64,
}

/// The discrete energy distribution `E ↦ |⟨E|Ψ⟩|²` of a state together with
/// `ħ` and the ground energy.
///
/// Every bound and the survival amplitude depend on a state only through
/// this distribution. Points are sorted by energy, distinct, and carry
/// strictly positive weight.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyDistribution {
    hbar: f64,
    ground_energy: f64,
    points: Vec<(f64, f64)>,
}

impl EnergyDistribution {
    /// Builds a distribution from `(energy, weight)` pairs, merging equal
    /// energies and dropping zero weights. Inputs are assumed validated.
    pub(crate) fn from_weights<I>(weights: I, hbar: f64, ground_energy: f64) -> Self
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut raw: Vec<(f64, f64)> = weights.into_iter().filter(|&(_, w)| w > 0.0).collect();
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut points: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (e, w) in raw {
            match points.last_mut() {
                Some(last) if last.0 == e => last.1 += w,
                _ => points.push((e, w)),
            }
        }
        Self {
            hbar,
            ground_energy,
            points,
        }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }

    /// `(energy, weight)` pairs, ascending in energy.
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn total_weight(&self) -> f64 {
        crate::numerics::compensated_sum(self.points.iter().map(|p| p.1))
    }

    /// Spread between the highest and lowest populated energies.
    pub fn span(&self) -> f64 {
        match (self.points.first(), self.points.last()) {
            (Some(lo), Some(hi)) => hi.0 - lo.0,
            _ => 0.0,
        }
    }

    /// Lowest populated energy.
    pub fn min_energy(&self) -> Option<f64> {
        self.points.first().map(|p| p.0)
    }

    /// Highest populated energy.
    pub fn max_energy(&self) -> Option<f64> {
        self.points.last().map(|p| p.0)
    }
}

impl AsRef<EnergyDistribution> for EnergyDistribution {
    fn as_ref(&self) -> &EnergyDistribution {
        self
    }
}

/// A normalized pure state `Σ c_k |E_k⟩` over a finite set of energy levels.
///
/// Levels are stored sorted by energy with duplicates merged by amplitude
/// addition. The ground energy is explicit: it defaults to the lowest listed
/// energy but may lie below every populated level.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    levels: Vec<Level>,
    distribution: EnergyDistribution,
}

impl SpectralState {
    /// State with `ħ = 1` and ground energy at the lowest listed level.
    pub fn new<I>(levels: I) -> Result<Self, StateError>
    where
        I: IntoIterator<Item = (f64, Complex64)>,
    {
        Self::with_params(levels, 1.0, None)
    }

    pub fn with_params<I>(levels: I, hbar: f64, ground_energy: Option<f64>) -> Result<Self, StateError>
    where
        I: IntoIterator<Item = (f64, Complex64)>,
    {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(StateError::InvalidHbar(hbar));
        }
        let mut raw = Vec::new();
        for (index, (energy, amplitude)) in levels.into_iter().enumerate() {
            if !energy.is_finite() || !amplitude.re.is_finite() || !amplitude.im.is_finite() {
                return Err(StateError::NonFinite { index });
            }
            raw.push(Level { energy, amplitude });
        }
        if raw.is_empty() {
            return Err(StateError::Empty);
        }
        raw.sort_by(|a, b| a.energy.total_cmp(&b.energy));

        let mut merged: Vec<Level> = Vec::with_capacity(raw.len());
        for level in raw {
            match merged.last_mut() {
                Some(last) if last.energy == level.energy => last.amplitude += level.amplitude,
                _ => merged.push(level),
            }
        }

        let lowest = merged[0].energy;
        let ground = match ground_energy {
            Some(g) if !g.is_finite() => return Err(StateError::InvalidGround(g)),
            Some(g) => g,
            None => lowest,
        };
        if lowest < ground {
            return Err(StateError::BelowGround { energy: lowest, ground });
        }

        let norm = crate::numerics::compensated_sum(merged.iter().map(|l| l.amplitude.norm_sqr()));
        if (norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(StateError::NotNormalized { norm });
        }

        let distribution =
            EnergyDistribution::from_weights(merged.iter().map(|l| (l.energy, l.amplitude.norm_sqr())), hbar, ground);
        Ok(Self {
            levels: merged,
            distribution,
        })
    }

    pub fn hbar(&self) -> f64 {
        self.distribution.hbar
    }

    pub fn ground_energy(&self) -> f64 {
        self.distribution.ground_energy
    }

    /// Levels sorted by energy.
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn distribution(&self) -> &EnergyDistribution {
        &self.distribution
    }

    /// Same levels with every energy and the ground energy shifted by `shift`.
    pub fn shifted(&self, shift: f64) -> Result<Self, StateError> {
        Self::with_params(
            self.levels.iter().map(|l| (l.energy + shift, l.amplitude)),
            self.hbar(),
            Some(self.ground_energy() + shift),
        )
    }

    /// Same state with every amplitude multiplied by `phase`, which should
    /// have unit modulus.
    pub fn with_global_phase(&self, phase: Complex64) -> Result<Self, StateError> {
        Self::with_params(
            self.levels.iter().map(|l| (l.energy, l.amplitude * phase)),
            self.hbar(),
            Some(self.ground_energy()),
        )
    }
}

impl AsRef<EnergyDistribution> for SpectralState {
    fn as_ref(&self) -> &EnergyDistribution {
        &self.distribution
    }
}
