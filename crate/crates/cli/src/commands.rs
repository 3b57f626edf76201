use std::fs;
use std::io::{self, Write};
use std::path::Path;

use qsl_core::dynamics::{
    default_horizon, orthogonalization_time, required_grid_points, DynamicsError, OrthogonalizationResult,
};
use qsl_core::minorant::verify_alpha_minorant;
use qsl_core::mixed::{uhlmann_check, MixedError, UhlmannCheck};
use qsl_core::optimizer::{
    default_sweep, doublet_report, sweep_alpha, AlphaSweepResult, ComparisonReport, ReportError, SOUNDNESS_SLACK,
};
use qsl_core::spectral::{alpha_bound, ml_bound, mt_bound, BoundReport, SpectralState, StateError};
use qsl_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{CliError, Failure};
use crate::files::{dump_state, load_density, load_state};
use crate::format::{num, nums, sig17};

/// Tolerance on the Uhlmann margin below which the inequality counts as violated.
const UHLMANN_SLACK: f64 = -1e-9;

/// A report document plus an optional failure that should still set the exit status.
pub struct Outcome {
    pub document: Value,
    pub failure: Option<CliError>,
}

impl From<Value> for Outcome {
    fn from(document: Value) -> Self {
        Self {
            document,
            failure: None,
        }
    }
}

fn document(inputs: Value, bounds: Value, t1: Value, certificates: Value) -> Value {
    json!({ "inputs": inputs, "bounds": bounds, "t1": t1, "certificates": certificates })
}

fn bound_json(b: &BoundReport) -> Value {
    json!({ "kind": b.kind.to_string(), "value": num(b.value), "moment": num(b.moment_used) })
}

fn sweep_json(s: &AlphaSweepResult) -> Value {
    json!({
        "best_alpha": num(s.best_alpha),
        "best_value": num(s.best_value),
        "refined": s.refined,
        "samples": s.samples.iter().map(|&(a, v)| nums([a, v])).collect::<Vec<_>>(),
    })
}

fn t1_json(r: &OrthogonalizationResult) -> Value {
    json!({
        "t_first": num(r.t_first),
        "residual": num(r.residual),
        "reached": r.reached,
        "tolerance": num(r.tolerance),
        "scan_horizon": num(r.scan_horizon),
        "grid_points": r.grid_points,
    })
}

fn soundness_json(report: &ComparisonReport) -> Value {
    let violations = report.violations();
    json!({
        "checked": report.t1.is_some_and(|t| t.reached),
        "slack": num(SOUNDNESS_SLACK),
        "holds": violations.is_empty(),
        "violations": violations
            .iter()
            .map(|(k, v)| json!({ "kind": k.to_string(), "value": num(*v) }))
            .collect::<Vec<_>>(),
    })
}

fn soundness_failure(report: &ComparisonReport) -> Option<CliError> {
    report
        .check_soundness()
        .err()
        .map(|e| CliError::constraint(e.to_string()))
}

fn state_summary(path: &Path, state: &SpectralState) -> Value {
    json!({
        "path": path.display().to_string(),
        "hbar": num(state.hbar()),
        "ground_energy": num(state.ground_energy()),
        "levels": state.len(),
    })
}

fn bad_flag(e: impl std::fmt::Display) -> CliError {
    CliError::parse(e.to_string())
}

pub struct BoundsArgs<'a> {
    pub state: &'a Path,
    pub alphas: &'a [f64],
    pub optimize: bool,
    pub sweep_range: Option<&'a [f64]>,
    pub sweep_grid: usize,
    pub dump: Option<&'a Path>,
}

pub fn bounds(args: BoundsArgs<'_>) -> Result<Outcome, CliError> {
    let state = load_state(args.state)?;
    if let Some(path) = args.dump {
        dump_state(&state, path)?;
    }
    let alpha_bounds = args
        .alphas
        .iter()
        .map(|&a| alpha_bound(&state, a).map_err(|e| CliError::parse(format!("--alpha-list: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;

    let optimize = args.optimize || args.sweep_range.is_some();
    let sweep = match (optimize, args.sweep_range) {
        (false, _) => None,
        (true, Some([lo, hi])) => Some(sweep_alpha(&state, *lo, *hi, args.sweep_grid).map_err(bad_flag)?),
        (true, Some(other)) => {
            return Err(CliError::parse(format!(
                "--sweep-range expects MIN,MAX, got {} values",
                other.len()
            )))
        }
        (true, None) => Some(
            sweep_alpha(
                &state,
                qsl_core::optimizer::DEFAULT_ALPHA_MIN,
                qsl_core::optimizer::DEFAULT_ALPHA_MAX,
                args.sweep_grid,
            )
            .map_err(bad_flag)?,
        ),
    };

    let inputs = json!({
        "command": "bounds",
        "state": state_summary(args.state, &state),
        "alpha_list": nums(args.alphas.iter().copied()),
        "optimize": optimize,
        "sweep_grid": args.sweep_grid,
    });
    let bounds = json!({
        "mt": bound_json(&mt_bound(&state)),
        "ml": bound_json(&ml_bound(&state)),
        "alpha": alpha_bounds
            .iter()
            .zip(args.alphas)
            .map(|(b, &a)| json!({ "alpha": num(a), "value": num(b.value), "moment": num(b.moment_used) }))
            .collect::<Vec<_>>(),
        "sweep": sweep.as_ref().map_or(Value::Null, sweep_json),
    });
    Ok(document(inputs, bounds, Value::Null, Value::Null).into())
}

pub struct T1Args<'a> {
    pub state: &'a Path,
    pub t_max: Option<f64>,
    pub grid: Option<usize>,
    pub tol: f64,
    pub dump: Option<&'a Path>,
}

pub fn t1(args: T1Args<'_>) -> Result<Outcome, CliError> {
    let state = load_state(args.state)?;
    if let Some(path) = args.dump {
        dump_state(&state, path)?;
    }
    let (t_max, horizon) = match args.t_max {
        Some(t) => (
            t,
            json!({ "source": "flag", "periodic": Value::Null, "fundamental_gap": Value::Null }),
        ),
        None => {
            let h = default_horizon(&state).map_err(|e| {
                CliError::new(
                    Failure::Horizon,
                    format!("cannot infer a scan horizon ({e}); pass --t-max"),
                )
            })?;
            let gap = h.fundamental_gap.map_or(Value::Null, num);
            (
                h.t_max,
                json!({ "source": "inferred", "periodic": h.periodic, "fundamental_gap": gap }),
            )
        }
    };
    let grid = match args.grid {
        Some(g) => g,
        None if t_max.is_finite() && t_max > 0.0 => required_grid_points(&state, t_max),
        None => return Err(bad_flag(DynamicsError::InvalidHorizon(t_max))),
    };
    let result = orthogonalization_time(&state, t_max, grid, args.tol).map_err(bad_flag)?;
    let report =
        ComparisonReport::new(&state, &[], default_sweep(&state), Some(result)).expect("no explicit alphas requested");

    let inputs = json!({
        "command": "t1",
        "state": state_summary(args.state, &state),
        "t_max": num(t_max),
        "grid": grid,
        "tol": num(args.tol),
        "horizon": horizon,
    });
    let bounds = json!({
        "mt": bound_json(&report.mt),
        "ml": bound_json(&report.ml),
        "sweep": sweep_json(&report.alpha_sweep),
        "winner": report.winner.to_string(),
    });
    Ok(Outcome {
        failure: soundness_failure(&report),
        document: document(
            inputs,
            bounds,
            t1_json(&result),
            json!({ "soundness": soundness_json(&report) }),
        ),
    })
}

pub fn verify_minorant(alpha: f64, x_max: f64, samples: usize) -> Result<Outcome, CliError> {
    let cert = verify_alpha_minorant(alpha, x_max, samples).map_err(bad_flag)?;
    let (sine, cosine) = cert.minorant_coefficients();
    let inputs = json!({ "command": "verify-minorant", "alpha": num(alpha), "x_max": num(x_max), "samples": samples });
    let certificate = json!({
        "alpha": num(cert.alpha),
        "sine_coefficient": num(cert.sine_coefficient),
        "cosine_coefficient": num(cert.cosine_coefficient),
        "offset": num(cert.offset),
        "minorant_a": num(sine),
        "minorant_b": num(cosine),
        "x_max": num(cert.x_max),
        "samples": cert.samples,
        "min_value": num(cert.min_value),
        "argmin": num(cert.argmin),
        "verified": cert.verified,
    });
    let failure = (!cert.verified).then(|| {
        CliError::new(
            Failure::MinorantViolated,
            format!(
                "minorant inequality violated at x = {} (residual {})",
                sig17(cert.argmin),
                sig17(cert.min_value)
            ),
        )
    });
    Ok(Outcome {
        document: document(inputs, Value::Null, Value::Null, json!({ "minorant": certificate })),
        failure,
    })
}

pub struct DoubletArgs<'a> {
    pub n: u64,
    pub lambda: Complex64,
    pub epsilon: f64,
    pub hbar: f64,
    pub sweep_n: &'a [u64],
    pub csv: Option<&'a Path>,
    pub dump: Option<&'a Path>,
}

fn report_error(e: ReportError) -> CliError {
    match e {
        ReportError::State(StateError::InvalidParameter(msg)) => CliError::constraint(msg),
        ReportError::Dynamics(DynamicsError::SingleLevel) => CliError::new(Failure::Horizon, e.to_string()),
        other => CliError::constraint(other.to_string()),
    }
}

/// Row for `n,t1,mt,ml,alpha_half,alpha_best,best_alpha`.
fn csv_row(n: u64, report: &ComparisonReport) -> Vec<String> {
    let t1 = report.t1.map_or(f64::NAN, |t| t.t_first);
    let mut row = vec![n.to_string()];
    row.extend(
        [
            t1,
            report.mt.value,
            report.ml.value,
            report.alpha_bounds[0].value,
            report.alpha_sweep.best_value,
            report.alpha_sweep.best_alpha,
        ]
        .map(sig17),
    );
    row
}

fn write_csv(rows: &[Vec<String>], target: Option<&Path>) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io_err = |e: csv::Error| CliError::parse(format!("CSV output: {e}"));
    w.write_record(["n", "t1", "mt", "ml", "alpha_half", "alpha_best", "best_alpha"])
        .map_err(io_err)?;
    for row in rows {
        w.write_record(row).map_err(io_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::parse(format!("CSV output: {e}")))?;
    match target {
        Some(path) => {
            fs::write(path, bytes).map_err(|e| CliError::parse(format!("cannot write {}: {e}", path.display())))
        }
        None => io::stdout()
            .write_all(&bytes)
            .map_err(|e| CliError::parse(format!("cannot write CSV: {e}"))),
    }
}

/// Returns `None` when the CSV took the place of the report on stdout.
pub fn example_doublet(args: DoubletArgs<'_>) -> Result<Option<Outcome>, CliError> {
    let report = doublet_report(args.n, args.lambda, args.epsilon, args.hbar).map_err(report_error)?;
    if let Some(path) = args.dump {
        let state = qsl_core::spectral::make_doublet_state(args.n, args.lambda, args.epsilon, args.hbar)
            .map_err(|e| CliError::constraint(e.to_string()))?;
        dump_state(&state, path)?;
    }

    if !args.sweep_n.is_empty() {
        let mut rows = Vec::with_capacity(args.sweep_n.len());
        for &n in args.sweep_n {
            let r = doublet_report(n, args.lambda, args.epsilon, args.hbar).map_err(report_error)?;
            rows.push(csv_row(n, &r));
        }
        write_csv(&rows, args.csv)?;
        if args.csv.is_none() {
            return Ok(None);
        }
    }

    let t1 = report.t1.expect("doublet report always searches for t1");
    let inputs = json!({
        "command": "example-doublet",
        "n": args.n,
        "lambda": { "re": num(args.lambda.re), "im": num(args.lambda.im) },
        "epsilon": num(args.epsilon),
        "hbar": num(args.hbar),
        "b_squared": num(args.lambda.norm_sqr() / (2.0 * (args.n as f64).sqrt())),
        "sweep_n": args.sweep_n,
    });
    let bounds = json!({
        "mt": bound_json(&report.mt),
        "ml": bound_json(&report.ml),
        "alpha": report.alpha_bounds.iter().map(bound_json).collect::<Vec<_>>(),
        "sweep": sweep_json(&report.alpha_sweep),
        "winner": report.winner.to_string(),
    });
    Ok(Some(Outcome {
        document: document(
            inputs,
            bounds,
            t1_json(&t1),
            json!({ "soundness": soundness_json(&report) }),
        ),
        failure: None,
    }))
}

pub enum MixedMode {
    Time(f64),
    Samples { count: usize, seed: u64 },
}

fn uhlmann_json(c: &UhlmannCheck) -> Value {
    json!({
        "t": num(c.t),
        "fidelity": num(c.fidelity),
        "overlap_sq": num(c.overlap_sq),
        "margin": num(c.margin),
        "holds": c.holds,
    })
}

fn mixed_error(e: MixedError) -> CliError {
    CliError::constraint(e.to_string())
}

pub fn mixed(path: &Path, mode: MixedMode) -> Result<Outcome, CliError> {
    let rho = load_density(path)?;
    let mut inputs = json!({
        "command": "mixed",
        "density": {
            "path": path.display().to_string(),
            "dim": rho.dim(),
            "hbar": num(rho.hbar()),
            "ground_energy": num(rho.ground_energy()),
        },
    });
    let certificate = match mode {
        MixedMode::Time(t) => {
            inputs["time"] = num(t);
            let check = uhlmann_check(&rho, t).map_err(mixed_error)?;
            json!({ "uhlmann": uhlmann_json(&check), "holds": check.margin >= UHLMANN_SLACK })
        }
        MixedMode::Samples { count, seed } => {
            let horizon = default_horizon(rho.distribution())
                .map_err(|e| CliError::new(Failure::Horizon, format!("cannot infer a sampling horizon: {e}")))?;
            inputs["uhlmann_samples"] = json!(count);
            inputs["seed"] = json!(seed);
            inputs["horizon"] = num(horizon.t_max);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst: Option<UhlmannCheck> = None;
            for _ in 0..count {
                let check = uhlmann_check(&rho, rng.random_range(0.0..horizon.t_max)).map_err(mixed_error)?;
                if worst.is_none_or(|w| check.margin < w.margin) {
                    worst = Some(check);
                }
            }
            let min_margin = worst.map_or(f64::INFINITY, |w| w.margin);
            json!({
                "samples": count,
                "min_margin": num(min_margin),
                "worst": worst.as_ref().map_or(Value::Null, uhlmann_json),
                "holds": min_margin >= UHLMANN_SLACK,
            })
        }
    };
    let failure = (certificate["holds"] == Value::Bool(false))
        .then(|| CliError::constraint("Uhlmann inequality violated beyond numerical slack"));
    Ok(Outcome {
        document: document(inputs, Value::Null, Value::Null, json!({ "uhlmann": certificate })),
        failure,
    })
}
