//! `qsl`: quantum speed-limit bounds from the command line.

mod commands;
mod error;
mod files;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use qsl_core::dynamics::DEFAULT_TOLERANCE;
use qsl_core::optimizer::DEFAULT_ALPHA_GRID;
use qsl_core::Complex64;

use commands::{BoundsArgs, DoubletArgs, MixedMode, Outcome, T1Args};
use error::CliError;

/// Lower bounds on the orthogonalization time of finite-spectrum quantum states.
///
/// Reports are a single JSON document on stdout with keys `inputs`, `bounds`,
/// `t1` and `certificates`. Exit status: 0 ok, 2 parse or flag error,
/// 3 constraint violation, 4 horizon inference failure, 5 minorant violation.
#[derive(Debug, Parser)]
#[command(name = "qsl", version)]
struct Cli {
    /// Render the report as indented text instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mandelstam-Tamm, Margolus-Levitin and alpha-family bounds for a state file.
    Bounds(BoundsCmd),
    /// Search for the first orthogonalization time and check every bound against it.
    T1(T1Cmd),
    /// Check the trigonometric minorant inequality for a power alpha on a grid.
    VerifyMinorant(MinorantCmd),
    /// Four-level doublet family: bounds, t1 and optional scaling sweep as CSV.
    ExampleDoublet(DoubletCmd),
    /// Fidelity, purified overlap and the Uhlmann inequality for a density matrix.
    Mixed(MixedCmd),
}

#[derive(Debug, Args)]
struct BoundsCmd {
    /// State file (JSON).
    state: PathBuf,
    /// Comma-separated alpha values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    alpha_list: Vec<f64>,
    /// Maximize the alpha-family bound over alpha.
    #[arg(long)]
    optimize: bool,
    /// Sweep range MIN,MAX for --optimize (implies it). Default: 0.05,20.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    sweep_range: Option<Vec<f64>>,
    /// Number of log-spaced alpha grid points for the sweep.
    #[arg(long, default_value_t = DEFAULT_ALPHA_GRID)]
    sweep_grid: usize,
    /// Write the parsed state back out as a fully explicit state file.
    #[arg(long, value_name = "PATH")]
    dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct T1Cmd {
    /// State file (JSON).
    state: PathBuf,
    /// Scan horizon. Default: full recurrence period for commensurate
    /// spectra, otherwise 20*pi*hbar/<E - E_min>.
    #[arg(long, allow_negative_numbers = true)]
    t_max: Option<f64>,
    /// Number of grid points on (0, t_max]. Default: the smallest grid with
    /// spacing at most pi*hbar/(4*span).
    #[arg(long)]
    grid: Option<usize>,
    /// Orthogonality tolerance on |A(t)|.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE, allow_negative_numbers = true)]
    tol: f64,
    /// Write the parsed state back out as a fully explicit state file.
    #[arg(long, value_name = "PATH")]
    dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MinorantCmd {
    /// Exponent alpha > 0.
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Right end of the checked interval [0, x_max].
    #[arg(long, default_value_t = 50.0, allow_negative_numbers = true)]
    x_max: f64,
    /// Number of grid samples (spacing must stay below pi/100).
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

#[derive(Debug, Args)]
struct DoubletCmd {
    /// Index n of the upper doublet (n >= 2).
    #[arg(long, default_value_t = 10_000)]
    n: u64,
    /// Real part of lambda.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    lambda: f64,
    /// Imaginary part of lambda.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda_im: f64,
    /// Doublet splitting epsilon.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    hbar: f64,
    /// Comma-separated list of n for a CSV scaling table.
    #[arg(long, value_delimiter = ',')]
    sweep_n: Vec<u64>,
    /// Destination of the CSV table. Without it the table replaces the
    /// JSON report on stdout.
    #[arg(long, value_name = "PATH", requires = "sweep_n")]
    csv: Option<PathBuf>,
    /// Write the doublet state as a state file.
    #[arg(long, value_name = "PATH")]
    dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["time", "uhlmann_samples"])))]
struct MixedCmd {
    /// Density file (JSON).
    density: PathBuf,
    /// Single evaluation time.
    #[arg(long, allow_negative_numbers = true)]
    time: Option<f64>,
    /// Number of uniformly random times in the inferred horizon.
    #[arg(long)]
    uhlmann_samples: Option<usize>,
    /// Seed for the random times.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn dispatch(command: Command) -> Result<Option<Outcome>, CliError> {
    match command {
        Command::Bounds(c) => commands::bounds(BoundsArgs {
            state: &c.state,
            alphas: &c.alpha_list,
            optimize: c.optimize,
            sweep_range: c.sweep_range.as_deref(),
            sweep_grid: c.sweep_grid,
            dump: c.dump.as_deref(),
        })
        .map(Some),
        Command::T1(c) => commands::t1(T1Args {
            state: &c.state,
            t_max: c.t_max,
            grid: c.grid,
            tol: c.tol,
            dump: c.dump.as_deref(),
        })
        .map(Some),
        Command::VerifyMinorant(c) => commands::verify_minorant(c.alpha, c.x_max, c.samples).map(Some),
        Command::ExampleDoublet(c) => commands::example_doublet(DoubletArgs {
            n: c.n,
            lambda: Complex64::new(c.lambda, c.lambda_im),
            epsilon: c.epsilon,
            hbar: c.hbar,
            sweep_n: &c.sweep_n,
            csv: c.csv.as_deref(),
            dump: c.dump.as_deref(),
        }),
        Command::Mixed(c) => {
            let mode = match (c.time, c.uhlmann_samples) {
                (Some(t), _) => MixedMode::Time(t),
                (None, Some(count)) => MixedMode::Samples { count, seed: c.seed },
                (None, None) => unreachable!("clap enforces one of --time/--uhlmann-samples"),
            };
            commands::mixed(&c.density, mode).map(Some)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pretty = cli.pretty;
    match dispatch(cli.command) {
        Ok(outcome) => {
            let failure = outcome.and_then(|o| {
                if pretty {
                    print!("{}", format::to_text(&o.document));
                } else {
                    println!("{}", format::to_json(&o.document));
                }
                o.failure
            });
            match failure {
                None => ExitCode::SUCCESS,
                Some(e) => {
                    eprintln!("qsl: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            eprintln!("qsl: {e}");
            e.exit_code()
        }
    }
}
