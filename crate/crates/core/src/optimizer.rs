//! Maximizing the α-family bound over α and comparing bound families.
//!
//! Every α gives a valid bound, so the sweep only ever under-reports the
//! supremum: it samples a log grid, always includes α = 1, and refines
//! locally around the best grid point.

use num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::{self, DynamicsError, OrthogonalizationResult};
use crate::numerics::golden_section_maximize;
use crate::spectral::{
    alpha_bound, make_doublet_state, ml_bound, mt_bound, BoundError, BoundKind, BoundReport, EnergyDistribution,
    SpectralState, StateError,
};

pub const DEFAULT_ALPHA_MIN: f64 = 0.05;
pub const DEFAULT_ALPHA_MAX: f64 = 20.0;
pub const DEFAULT_ALPHA_GRID: usize = 64;
pub const MIN_ALPHA_GRID: usize = 8;
/// Absolute slack allowed when checking `bound ≤ t₁`.
pub const SOUNDNESS_SLACK: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizerError {
    #[error("invalid alpha range [{min}, {max}]")]
    InvalidRange { min: f64, max: f64 },
    #[error("alpha grid needs at least {MIN_ALPHA_GRID} points, got {0}")]
    GridTooSmall(usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReportError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
    #[error("{kind} bound {value} exceeds the orthogonalization time {t_first}")]
    SoundnessViolation { kind: BoundKind, value: f64, t_first: f64 },
}

/// α-family bound sampled over a range of α.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSweepResult {
    /// `(α, bound)` pairs in ascending α, always containing α = 1.
    pub samples: Vec<(f64, f64)>,
    pub best_alpha: f64,
    pub best_value: f64,
    /// Whether local refinement beat the best grid sample.
    pub refined: bool,
}

impl AlphaSweepResult {
    pub fn best_report(&self, state: impl AsRef<EnergyDistribution>) -> BoundReport {
        alpha_bound(state, self.best_alpha).expect("sweep alphas are positive")
    }
}

fn bound_at(dist: &EnergyDistribution, alpha: f64) -> f64 {
    alpha_bound(dist, alpha).map(|b| b.value).unwrap_or(0.0)
}

/// Samples the α-bound on `grid` log-spaced points of `[alpha_min,
/// alpha_max]` plus α = 1, then golden-section refines (in `ln α`) between
/// the neighbours of the best sample.
pub fn sweep_alpha(
    state: impl AsRef<EnergyDistribution>,
    alpha_min: f64,
    alpha_max: f64,
    grid: usize,
) -> Result<AlphaSweepResult, OptimizerError> {
    let dist = state.as_ref();
    if !(alpha_min.is_finite() && alpha_max.is_finite() && alpha_min > 0.0 && alpha_min < alpha_max) {
        return Err(OptimizerError::InvalidRange {
            min: alpha_min,
            max: alpha_max,
        });
    }
    if grid < MIN_ALPHA_GRID {
        return Err(OptimizerError::GridTooSmall(grid));
    }

    let (lo, hi) = (alpha_min.ln(), alpha_max.ln());
    let mut alphas: Vec<f64> = (0..grid)
        .map(|i| match i {
            0 => alpha_min,
            i if i == grid - 1 => alpha_max,
            i => (lo + (hi - lo) * i as f64 / (grid - 1) as f64).exp(),
        })
        .collect();
    alphas.push(1.0);
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();

    let samples: Vec<(f64, f64)> = alphas.iter().map(|&a| (a, bound_at(dist, a))).collect();
    let (best_idx, &(mut best_alpha, mut best_value)) = samples
        .iter()
        .enumerate()
        .reduce(|acc, cur| if cur.1 .1 > acc.1 .1 { cur } else { acc })
        .expect("grid is non-empty");

    let mut refined = false;
    if best_value.is_finite() {
        let left = samples[best_idx.saturating_sub(1)].0.ln();
        let right = samples[(best_idx + 1).min(samples.len() - 1)].0.ln();
        let (s, v) = golden_section_maximize(|s| bound_at(dist, s.exp()), left, right, 1e-10, 200);
        if v > best_value {
            best_alpha = s.exp();
            best_value = v;
            refined = true;
        }
    }

    Ok(AlphaSweepResult {
        samples,
        best_alpha,
        best_value,
        refined,
    })
}

/// Sweep over the default range `[0.05, 20]` with 64 points.
pub fn default_sweep(state: impl AsRef<EnergyDistribution>) -> AlphaSweepResult {
    sweep_alpha(state, DEFAULT_ALPHA_MIN, DEFAULT_ALPHA_MAX, DEFAULT_ALPHA_GRID).expect("default range is valid")
}

/// All bound families for one state, optionally against a located `t₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub mt: BoundReport,
    pub ml: BoundReport,
    /// Explicitly requested α values.
    pub alpha_bounds: Vec<BoundReport>,
    pub alpha_sweep: AlphaSweepResult,
    pub t1: Option<OrthogonalizationResult>,
    /// Kind of the largest bound; `+inf` beats every finite value.
    pub winner: BoundKind,
}

impl ComparisonReport {
    pub fn new(
        state: impl AsRef<EnergyDistribution>,
        alphas: &[f64],
        alpha_sweep: AlphaSweepResult,
        t1: Option<OrthogonalizationResult>,
    ) -> Result<Self, BoundError> {
        let dist = state.as_ref();
        let mt = mt_bound(dist);
        let ml = ml_bound(dist);
        let alpha_bounds = alphas
            .iter()
            .map(|&a| alpha_bound(dist, a))
            .collect::<Result<Vec<_>, _>>()?;

        let sweep_best = (BoundKind::Alpha(alpha_sweep.best_alpha), alpha_sweep.best_value);
        let winner = [(mt.kind, mt.value), (ml.kind, ml.value)]
            .into_iter()
            .chain(alpha_bounds.iter().map(|b| (b.kind, b.value)))
            .chain(std::iter::once(sweep_best))
            .reduce(|acc, cur| if cur.1 > acc.1 { cur } else { acc })
            .map(|(kind, _)| kind)
            .expect("at least two candidates");

        Ok(Self {
            mt,
            ml,
            alpha_bounds,
            alpha_sweep,
            t1,
            winner,
        })
    }

    /// Every finite bound with its value, the sweep optimum included.
    pub fn all_bounds(&self) -> Vec<(BoundKind, f64)> {
        let mut out = vec![(self.mt.kind, self.mt.value), (self.ml.kind, self.ml.value)];
        out.extend(self.alpha_bounds.iter().map(|b| (b.kind, b.value)));
        out.extend(self.alpha_sweep.samples.iter().map(|&(a, v)| (BoundKind::Alpha(a), v)));
        out.push((
            BoundKind::Alpha(self.alpha_sweep.best_alpha),
            self.alpha_sweep.best_value,
        ));
        out
    }

    /// Bounds exceeding a reached `t₁` by more than [`SOUNDNESS_SLACK`].
    pub fn violations(&self) -> Vec<(BoundKind, f64)> {
        match self.t1 {
            Some(t1) if t1.reached => self
                .all_bounds()
                .into_iter()
                .filter(|&(_, v)| v > t1.t_first + SOUNDNESS_SLACK)
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn check_soundness(&self) -> Result<(), ReportError> {
        match (self.violations().first(), self.t1) {
            (Some(&(kind, value)), Some(t1)) => Err(ReportError::SoundnessViolation {
                kind,
                value,
                t_first: t1.t_first,
            }),
            _ => Ok(()),
        }
    }
}

/// The four-level doublet example: builds the state, evaluates MT, ML,
/// α = 1/2 and the default sweep, locates `t₁` and checks every bound
/// against it.
pub fn doublet_report(n: u64, lambda: Complex64, epsilon: f64, hbar: f64) -> Result<ComparisonReport, ReportError> {
    let state = make_doublet_state(n, lambda, epsilon, hbar)?;
    compare_with_t1(&state, &[0.5], dynamics::DEFAULT_TOLERANCE)
}

/// Comparison report with the default sweep and a located `t₁`, verified
/// for soundness.
pub fn compare_with_t1(state: &SpectralState, alphas: &[f64], tolerance: f64) -> Result<ComparisonReport, ReportError> {
    let t1 = dynamics::find_orthogonalization(state, tolerance)?;
    let report = ComparisonReport::new(state, alphas, default_sweep(state), Some(t1))?;
    report.check_soundness()?;
    Ok(report)
}
