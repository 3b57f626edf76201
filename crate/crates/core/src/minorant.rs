//! Trigonometric minorants `f(x) ≥ A sin x + B cos x` on `x ≥ 0`.
//!
//! Averaging such an inequality over the energy distribution at the
//! orthogonalization time, where `⟨sin⟩ = ⟨cos⟩ = 0`, gives `⟨f⟩ ≥ 0` and
//! hence a bound. The α-family
//! `x^α − π^α/2 + (π^α/2) cos x + α π^{α−1} sin x ≥ 0` is verified here on
//! grids with local refinement.

use std::f64::consts::{FRAC_PI_2, PI};

use thiserror::Error;

use crate::numerics::{compensated_sum, ternary_minimize};
use crate::spectral::EnergyDistribution;

/// Residuals at or above this count as non-negative.
pub const HOLDS_THRESHOLD: f64 = -1e-9;
/// Coarsest sample spacing accepted by [`check_minorant`].
pub const MAX_SAMPLE_SPACING: f64 = PI / 100.0;
pub const MIN_VERIFY_SAMPLES: usize = 1000;

/// `π − PI` in double precision.
const PI_LO: f64 = 1.224_646_799_147_353_2e-16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MinorantError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("samples must start at 0, increase, and be spaced by at most pi/100: {0}")]
    InsufficientSampling(String),
    #[error("minorant inequality fails on [0, {x_max}]")]
    MinorantNotVerified { x_max: f64 },
}

fn check_alpha(alpha: f64) -> Result<(), MinorantError> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(MinorantError::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )))
    }
}

/// `x^α − π^α/2 + (π^α/2) cos x + α π^{α−1} sin x`.
pub fn alpha_minorant_residual(alpha: f64, x: f64) -> Result<f64, MinorantError> {
    check_alpha(alpha)?;
    if x.is_nan() || x < 0.0 {
        return Err(MinorantError::InvalidParameter(format!(
            "x must be non-negative, got {x}"
        )));
    }
    Ok(residual(alpha, x))
}

fn residual(alpha: f64, x: f64) -> f64 {
    let pi_alpha = PI.powf(alpha);
    let sine_coeff = alpha * PI.powf(alpha - 1.0);
    if (FRAC_PI_2..=3.0 * FRAC_PI_2).contains(&x) {
        // Around the double zero at π the three terms cancel to first order;
        // expand in u = x − π instead.
        let u = (x - PI) - PI_LO;
        let power_diff = pi_alpha * (alpha * (u / PI).ln_1p()).exp_m1();
        let half = (0.5 * u).sin();
        power_diff + pi_alpha * half * half - sine_coeff * u.sin()
    } else {
        let half = 0.5 * pi_alpha;
        x.powf(alpha) - half + half * x.cos() + sine_coeff * x.sin()
    }
}

/// Grid evidence that the α-family residual is non-negative on `[0, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinorantCertificate {
    pub alpha: f64,
    /// `α π^{α−1}`, the coefficient of `sin x` in the residual.
    pub sine_coefficient: f64,
    /// `π^α/2`, the coefficient of `cos x` in the residual.
    pub cosine_coefficient: f64,
    /// `π^α/2`, the constant subtracted from `x^α`.
    pub offset: f64,
    pub x_max: f64,
    pub samples: usize,
    pub min_value: f64,
    pub argmin: f64,
    pub verified: bool,
}

impl MinorantCertificate {
    /// `(A, B)` such that `x^α − π^α/2 ≥ A sin x + B cos x`.
    pub fn minorant_coefficients(&self) -> (f64, f64) {
        (-self.sine_coefficient, -self.cosine_coefficient)
    }

    /// The function side `f(x) = x^α − π^α/2` as a descriptor.
    pub fn function(&self) -> MinorantFunction {
        MinorantFunction::AlphaPower { alpha: self.alpha }
    }
}

/// Scans the residual on `samples + 1` uniform points of `[0, x_max]`, adds
/// the analytic zeros `0` and `π`, and ternary-refines every grid-local
/// minimum.
pub fn verify_alpha_minorant(alpha: f64, x_max: f64, samples: usize) -> Result<MinorantCertificate, MinorantError> {
    check_alpha(alpha)?;
    if !(x_max.is_finite() && x_max >= 2.0 * PI) {
        return Err(MinorantError::InvalidParameter(format!(
            "x_max must be at least 2*pi, got {x_max}"
        )));
    }
    if samples < MIN_VERIFY_SAMPLES {
        return Err(MinorantError::InvalidParameter(format!(
            "need at least {MIN_VERIFY_SAMPLES} samples, got {samples}"
        )));
    }
    let dx = x_max / samples as f64;
    let values: Vec<f64> = (0..=samples).map(|i| residual(alpha, i as f64 * dx)).collect();

    let mut best = (0.0, residual(alpha, 0.0));
    let mut consider = |x: f64, v: f64| {
        if v < best.1 {
            best = (x, v);
        }
    };
    consider(PI, residual(alpha, PI));
    for (i, &v) in values.iter().enumerate() {
        consider(i as f64 * dx, v);
        let left = if i == 0 { f64::INFINITY } else { values[i - 1] };
        let right = values.get(i + 1).copied().unwrap_or(f64::INFINITY);
        if v <= left && v <= right {
            let lo = i.saturating_sub(1) as f64 * dx;
            let hi = ((i + 1).min(samples)) as f64 * dx;
            let (x, fx) = ternary_minimize(|x| residual(alpha, x), lo, hi, 1e-12, 200);
            consider(x, fx);
        }
    }

    let half = 0.5 * PI.powf(alpha);
    Ok(MinorantCertificate {
        alpha,
        sine_coefficient: alpha * PI.powf(alpha - 1.0),
        cosine_coefficient: half,
        offset: half,
        x_max,
        samples,
        min_value: best.1,
        argmin: best.0,
        verified: best.1 >= HOLDS_THRESHOLD,
    })
}

/// A function tabulated at increasing abscissae starting from 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self, MinorantError> {
        if xs.len() != values.len() || xs.len() < 2 {
            return Err(MinorantError::InsufficientSampling(format!(
                "{} abscissae for {} values",
                xs.len(),
                values.len()
            )));
        }
        if xs[0] != 0.0 {
            return Err(MinorantError::InsufficientSampling(format!(
                "first sample at {}",
                xs[0]
            )));
        }
        if let Some(w) = xs
            .windows(2)
            .find(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return Err(MinorantError::InsufficientSampling(format!(
                "non-increasing at {}",
                w[1]
            )));
        }
        if xs.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(MinorantError::InsufficientSampling("non-finite sample".into()));
        }
        Ok(Self { xs, values })
    }

    /// Samples `f` at `n + 1` uniform points of `[0, x_max]`.
    pub fn from_fn(f: impl Fn(f64) -> f64, x_max: f64, n: usize) -> Result<Self, MinorantError> {
        let n = n.max(1);
        let dx = x_max / n as f64;
        let xs: Vec<f64> = (0..=n).map(|i| if i == n { x_max } else { i as f64 * dx }).collect();
        let values = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, values)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().expect("at least two samples")
    }

    fn max_spacing(&self) -> f64 {
        self.xs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Piecewise-linear interpolation; `None` outside the tabulated range.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        if !(x >= 0.0 && x <= self.x_max()) {
            return None;
        }
        let idx = self.xs.partition_point(|&xi| xi <= x);
        if idx == self.xs.len() {
            return self.values.last().copied();
        }
        let (x0, x1) = (self.xs[idx - 1], self.xs[idx]);
        let (y0, y1) = (self.values[idx - 1], self.values[idx]);
        Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }
}

/// The function side `f` of a minorant inequality.
#[derive(Debug, Clone, PartialEq)]
pub enum MinorantFunction {
    /// `f(x) = x^α − π^α/2`.
    AlphaPower {
        alpha: f64,
    },
    Tabulated(SampledFunction),
}

impl MinorantFunction {
    pub fn eval(&self, x: f64) -> Option<f64> {
        match self {
            MinorantFunction::AlphaPower { alpha } => (x >= 0.0).then(|| x.powf(*alpha) - 0.5 * PI.powf(*alpha)),
            MinorantFunction::Tabulated(table) => table.interpolate(x),
        }
    }

    /// Samples covering `[0, x_max]` at spacing at most `π/100`.
    fn samples_on(&self, x_max: f64) -> Result<SampledFunction, MinorantError> {
        match self {
            MinorantFunction::AlphaPower { alpha } => {
                check_alpha(*alpha)?;
                let n = (x_max / MAX_SAMPLE_SPACING).ceil() as usize + 1;
                let a = *alpha;
                SampledFunction::from_fn(|x| x.powf(a) - 0.5 * PI.powf(a), x_max.max(MAX_SAMPLE_SPACING), n)
            }
            MinorantFunction::Tabulated(table) => {
                if table.x_max() < x_max {
                    return Err(MinorantError::InsufficientSampling(format!(
                        "table ends at {} but {x_max} is needed",
                        table.x_max()
                    )));
                }
                Ok(table.clone())
            }
        }
    }
}

/// True iff `f(x) − A sin x − B cos x ≥ −1e-9` at every sample.
pub fn check_minorant(a: f64, b: f64, f: &SampledFunction) -> Result<bool, MinorantError> {
    if f.max_spacing() > MAX_SAMPLE_SPACING * (1.0 + 1e-12) {
        return Err(MinorantError::InsufficientSampling(format!(
            "spacing {}",
            f.max_spacing()
        )));
    }
    Ok(f.xs
        .iter()
        .zip(&f.values)
        .all(|(&x, &fx)| fx - a * x.sin() - b * x.cos() >= HOLDS_THRESHOLD))
}

/// `⟨f(τ)⟩ − A⟨sin τ⟩ − B⟨cos τ⟩` with `τ = t(H − E₀)/ħ`, as a finite sum
/// over the populated levels.
///
/// The minorant is checked on `[0, t(E_max − E₀)/ħ]` first; a verified
/// minorant makes the result non-negative up to round-off.
pub fn minorant_expectation(
    state: impl AsRef<EnergyDistribution>,
    t: f64,
    f: &MinorantFunction,
    a: f64,
    b: f64,
) -> Result<f64, MinorantError> {
    let dist = state.as_ref();
    if !(t.is_finite() && t > 0.0) {
        return Err(MinorantError::InvalidParameter(format!("t must be positive, got {t}")));
    }
    let ground = dist.ground_energy();
    let scale = t / dist.hbar();
    let x_max = dist.max_energy().map_or(0.0, |e| (e - ground) * scale);
    let table = f.samples_on(x_max)?;
    if !check_minorant(a, b, &table)? {
        return Err(MinorantError::MinorantNotVerified { x_max });
    }
    let terms: Result<Vec<f64>, MinorantError> = dist
        .points()
        .iter()
        .map(|&(e, w)| {
            let x = (e - ground) * scale;
            let fx = f
                .eval(x)
                .ok_or_else(|| MinorantError::InsufficientSampling(format!("no value at {x}")))?;
            Ok(w * (fx - a * x.sin() - b * x.cos()))
        })
        .collect();
    Ok(compensated_sum(terms?))
}
