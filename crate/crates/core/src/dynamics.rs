//! Survival amplitude `⟨Ψ|e^{−itH/ħ}|Ψ⟩` and numerical orthogonalization times.
//!
//! The first orthogonalization time is located by scanning `|A(t)|²` on a
//! uniform grid fine enough to resolve the fastest oscillation, then
//! refining each qualifying grid-local minimum with a ternary search.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{compensated_sum, ternary_minimize};
use crate::spectral::EnergyDistribution;

/// Default `|A|` threshold for calling a state orthogonal.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Smallest accepted grid.
pub const MIN_GRID_POINTS: usize = 16;

const REFINE_REL_TOL: f64 = 1e-12;
const REFINE_MAX_ITER: usize = 200;
/// Phasor recurrences are resynchronized with exact exponentials this often.
const RESYNC_EVERY: usize = 256;
/// Largest denominator tried when reconstructing gap ratios.
const MAX_RATIO_DENOMINATOR: u64 = 10_000;
const RATIO_TOL: f64 = 1e-9;
/// Recurrence periods needing more than this many fastest oscillations are
/// treated as non-periodic.
const MAX_PERIOD_OSCILLATIONS: f64 = 1e7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("grid spacing {spacing} exceeds the aliasing limit {limit}")]
    GridTooCoarse { spacing: f64, limit: f64 },
    #[error("scan horizon must be finite and positive, got {0}")]
    InvalidHorizon(f64),
    #[error("grid needs at least {MIN_GRID_POINTS} points, got {0}")]
    InvalidGrid(usize),
    #[error("tolerance must be finite and positive, got {0}")]
    InvalidTolerance(f64),
    #[error("state populates a single level and has no recurrence horizon")]
    SingleLevel,
}

/// One evaluation of the survival amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSample {
    pub t: f64,
    pub value: Complex64,
}

/// Outcome of a first-orthogonalization search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalizationResult {
    /// First near-zero of `|A(t)|` found, or the location of the smallest
    /// `|A|` seen when `reached` is false.
    pub t_first: f64,
    /// `|A(t_first)|`.
    pub residual: f64,
    pub reached: bool,
    pub tolerance: f64,
    pub scan_horizon: f64,
    pub grid_points: usize,
}

/// Scan horizon suggested for a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horizon {
    pub t_max: f64,
    /// True when all populated gaps are integer multiples of
    /// `fundamental_gap` and `t_max` is the full recurrence period.
    pub periodic: bool,
    pub fundamental_gap: Option<f64>,
}

/// `A(t) = Σ_k |c_k|² e^{−itE_k/ħ}`.
///
/// Phases are accumulated relative to the lowest populated energy, so
/// `|A(t)|` depends on the energy gaps alone.
pub fn survival_amplitude(state: impl AsRef<EnergyDistribution>, t: f64) -> Complex64 {
    let dist = state.as_ref();
    let Some(origin) = dist.min_energy() else {
        return Complex64::new(0.0, 0.0);
    };
    relative_amplitude(dist, origin, t) * Complex64::from_polar(1.0, -t * origin / dist.hbar())
}

pub fn sample_amplitude(state: impl AsRef<EnergyDistribution>, t: f64) -> AmplitudeSample {
    AmplitudeSample {
        t,
        value: survival_amplitude(state, t),
    }
}

fn relative_amplitude(dist: &EnergyDistribution, origin: f64, t: f64) -> Complex64 {
    let scale = t / dist.hbar();
    let (re, im): (Vec<f64>, Vec<f64>) = dist
        .points()
        .iter()
        .map(|&(e, w)| {
            let (s, c) = (-(e - origin) * scale).sin_cos();
            (w * c, w * s)
        })
        .unzip();
    Complex64::new(compensated_sum(re), compensated_sum(im))
}

fn survival_probability(dist: &EnergyDistribution, t: f64) -> f64 {
    let origin = dist.min_energy().unwrap_or(0.0);
    relative_amplitude(dist, origin, t).norm_sqr()
}

/// Largest grid spacing allowed by the sampling rule, `πħ / (4·span)`.
/// Infinite for a state with a single populated level.
pub fn max_grid_spacing(state: impl AsRef<EnergyDistribution>) -> f64 {
    let dist = state.as_ref();
    let span = dist.span();
    if span > 0.0 {
        PI * dist.hbar() / (4.0 * span)
    } else {
        f64::INFINITY
    }
}

/// Smallest grid size satisfying the sampling rule on `(0, t_max]`.
pub fn required_grid_points(state: impl AsRef<EnergyDistribution>, t_max: f64) -> usize {
    let spacing = max_grid_spacing(state);
    let needed = (t_max / spacing).ceil();
    if needed.is_finite() {
        (needed as usize).saturating_add(1).max(MIN_GRID_POINTS)
    } else {
        MIN_GRID_POINTS
    }
}

/// Streams `|A(t_i)|²` at `t_i = i·dt` using per-level phasor recurrences.
struct GridScan<'a> {
    dist: &'a EnergyDistribution,
    origin: f64,
    dt: f64,
    steps: Vec<Complex64>,
    phasors: Vec<Complex64>,
    index: usize,
}

impl<'a> GridScan<'a> {
    fn new(dist: &'a EnergyDistribution, dt: f64) -> Self {
        let origin = dist.min_energy().unwrap_or(0.0);
        let steps = dist
            .points()
            .iter()
            .map(|&(e, _)| Complex64::from_polar(1.0, -(e - origin) * dt / dist.hbar()))
            .collect();
        let phasors = vec![Complex64::new(1.0, 0.0); dist.points().len()];
        Self {
            dist,
            origin,
            dt,
            steps,
            phasors,
            index: 0,
        }
    }

    /// Advances one step and returns `(t, |A(t)|²)`.
    fn next_value(&mut self) -> (f64, f64) {
        self.index += 1;
        let t = self.index as f64 * self.dt;
        if self.index.is_multiple_of(RESYNC_EVERY) {
            let scale = t / self.dist.hbar();
            for (p, &(e, _)) in self.phasors.iter_mut().zip(self.dist.points()) {
                *p = Complex64::from_polar(1.0, -(e - self.origin) * scale);
            }
        } else {
            for (p, s) in self.phasors.iter_mut().zip(&self.steps) {
                *p *= s;
            }
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for (p, &(_, w)) in self.phasors.iter().zip(self.dist.points()) {
            sum += p * w;
        }
        (t, sum.norm_sqr())
    }
}

/// Locates the first time `|A(t)|` drops to `tolerance` on `(0, t_max]`.
///
/// When no grid-local minimum refines below the tolerance the smallest
/// residual found is reported with `reached = false`.
pub fn orthogonalization_time(
    state: impl AsRef<EnergyDistribution>,
    t_max: f64,
    grid_points: usize,
    tolerance: f64,
) -> Result<OrthogonalizationResult, DynamicsError> {
    let dist = state.as_ref();
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(DynamicsError::InvalidHorizon(t_max));
    }
    if grid_points < MIN_GRID_POINTS {
        return Err(DynamicsError::InvalidGrid(grid_points));
    }
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(DynamicsError::InvalidTolerance(tolerance));
    }
    let dt = t_max / grid_points as f64;
    let limit = max_grid_spacing(dist);
    if dt > limit {
        return Err(DynamicsError::GridTooCoarse { spacing: dt, limit });
    }

    // |A| is Lipschitz with constant ⟨|E − Ē|⟩/ħ, so a zero inside a grid
    // cell forces a nearby grid value below `tolerance + lipschitz·dt`.
    let mean = compensated_sum(dist.points().iter().map(|&(e, w)| w * e));
    let lipschitz = compensated_sum(dist.points().iter().map(|&(e, w)| w * (e - mean).abs())) / dist.hbar();
    let gate = {
        let g = tolerance + lipschitz * dt;
        g * g
    };
    let tol_sq = tolerance * tolerance;

    let refine = |i: usize, grid_value: f64| -> (f64, f64) {
        let lo = (i - 1) as f64 * dt;
        let hi = ((i + 1).min(grid_points)) as f64 * dt;
        let (t, f) = ternary_minimize(
            |t| survival_probability(dist, t),
            lo,
            hi,
            REFINE_REL_TOL,
            REFINE_MAX_ITER,
        );
        if t > 0.0 && f <= grid_value {
            (t, f)
        } else {
            (i as f64 * dt, grid_value)
        }
    };

    let mut scan = GridScan::new(dist, dt);
    let mut prev = 1.0;
    let (_, mut cur) = scan.next_value();
    let mut best: Option<(f64, f64)> = None;
    let mut global_grid = (1usize, cur);

    for i in 1..=grid_points {
        let next = if i < grid_points { Some(scan.next_value()) } else { None };
        let is_local_min = cur <= prev && next.is_none_or(|(_, f)| cur <= f);
        if cur < global_grid.1 {
            global_grid = (i, cur);
        }
        if is_local_min && cur <= gate {
            let (t, f) = refine(i, cur);
            if f <= tol_sq {
                return Ok(OrthogonalizationResult {
                    t_first: t,
                    residual: f.sqrt(),
                    reached: true,
                    tolerance,
                    scan_horizon: t_max,
                    grid_points,
                });
            }
            if best.is_none_or(|b| f < b.1) {
                best = Some((t, f));
            }
        }
        if let Some((_, f_next)) = next {
            prev = cur;
            cur = f_next;
        }
    }

    let (gi, gf) = global_grid;
    let global = refine(gi, gf);
    let (t, f) = match best {
        Some(b) if b.1 <= global.1 => b,
        _ => global,
    };
    Ok(OrthogonalizationResult {
        t_first: t,
        residual: f.sqrt(),
        reached: false,
        tolerance,
        scan_horizon: t_max,
        grid_points,
    })
}

/// Suggested scan horizon.
///
/// Commensurate spectra get their full recurrence period `2πħ/g`, where `g`
/// divides every populated gap; otherwise `20πħ/⟨E − E_min⟩` is returned
/// with `periodic = false`.
pub fn default_horizon(state: impl AsRef<EnergyDistribution>) -> Result<Horizon, DynamicsError> {
    let dist = state.as_ref();
    let points = dist.points();
    if points.len() < 2 {
        return Err(DynamicsError::SingleLevel);
    }
    let origin = points[0].0;
    let gaps: Vec<f64> = points[1..].iter().map(|&(e, _)| e - origin).collect();

    if let Some(g) = common_divisor(&gaps) {
        if dist.span() / g <= MAX_PERIOD_OSCILLATIONS {
            return Ok(Horizon {
                t_max: 2.0 * PI * dist.hbar() / g,
                periodic: true,
                fundamental_gap: Some(g),
            });
        }
    }
    let mean_gap = compensated_sum(points.iter().map(|&(e, w)| w * (e - origin)));
    Ok(Horizon {
        t_max: 20.0 * PI * dist.hbar() / mean_gap,
        periodic: false,
        fundamental_gap: None,
    })
}

/// Largest `g` with every gap an integer multiple of `g`, found by
/// continued-fraction reconstruction of the ratios to the smallest gap.
fn common_divisor(gaps: &[f64]) -> Option<f64> {
    let reference = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    if !(reference > 0.0 && reference.is_finite()) {
        return None;
    }
    let mut lcm: u64 = 1;
    for &gap in gaps {
        let (_, den) = rational_approximation(gap / reference, MAX_RATIO_DENOMINATOR, RATIO_TOL)?;
        lcm = lcm / gcd(lcm, den) * den;
        if lcm > MAX_RATIO_DENOMINATOR * MAX_RATIO_DENOMINATOR {
            return None;
        }
    }
    let g = reference / lcm as f64;
    gaps.iter()
        .all(|&gap| {
            let q = gap / g;
            (q - q.round()).abs() <= RATIO_TOL * q.max(1.0)
        })
        .then_some(g)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Best convergent `p/q` of `x > 0` with `q ≤ max_den` and
/// `|x − p/q| ≤ tol·max(1, x)`.
fn rational_approximation(x: f64, max_den: u64, tol: f64) -> Option<(u64, u64)> {
    let (mut h_prev, mut h) = (0u64, 1u64);
    let (mut k_prev, mut k) = (1u64, 0u64);
    let mut r = x;
    let accept = tol * x.max(1.0);
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e15 {
            return None;
        }
        let a = a as u64;
        let h_next = a.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = a.checked_mul(k)?.checked_add(k_prev)?;
        if k_next > max_den {
            return None;
        }
        (h_prev, h, k_prev, k) = (h, h_next, k, k_next);
        if (x - h as f64 / k as f64).abs() <= accept {
            return Some((h, k));
        }
        let frac = r - a as f64;
        if frac <= 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// Horizon inference followed by a search on the minimal admissible grid.
pub fn find_orthogonalization(
    state: impl AsRef<EnergyDistribution>,
    tolerance: f64,
) -> Result<OrthogonalizationResult, DynamicsError> {
    let dist = state.as_ref();
    let horizon = default_horizon(dist)?;
    orthogonalization_time(
        dist,
        horizon.t_max,
        required_grid_points(dist, horizon.t_max),
        tolerance,
    )
}
