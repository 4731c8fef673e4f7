//! Command-line front end for the channel estimation experiments.
//!
//! Exit status: 0 on success, 1 when execution fails (including failed
//! `verify` checks), 2 on usage or validation errors.

mod specfile;

use std::env;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chanest_core::experiment::{self, fmt_sig9};
use chanest_core::verify::{self, VerifyOptions};
use chanest_core::{mse_lower_bound, Error as CoreError, EstimatorKind, SweepSpec};

/// Environment variable naming the directory relative output paths land in.
const OUT_DIR_VAR: &str = "CHANEST_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "chanest",
    version,
    about = "MIMO channel estimation with receive-power feedback: sweeps, \
             single-cell evaluation, MSE lower bounds and self-checks"
)]
struct Cli {
    /// Worker threads for Monte-Carlo trials (default: all cores). Results
    /// are bit-identical for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a (SNR x feedback-count x estimator) sweep and write CSV output.
    Sweep(SweepArgs),
    /// Evaluate one estimator at one grid point.
    Eval(EvalArgs),
    /// Evaluate the deterministic MSE lower bound.
    Bound(BoundArgs),
    /// Run the statistical self-checks; nonzero exit on any failure.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep spec file (`key = value` lines); flags override its values.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// SNR grid in dB, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    /// Feedback-count grid, comma separated.
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    /// Estimators, comma separated (mmse_classical, mmse_feedback,
    /// map_classical, map_feedback) or `all`.
    #[arg(long)]
    estimator: Option<String>,
    /// Monte-Carlo trials per cell.
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path; a `.meta` sidecar is written alongside. Relative
    /// paths land in $CHANEST_OUT_DIR when set.
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Estimator tag.
    #[arg(long)]
    estimator: EstimatorTag,
    /// Number of disclosed gains.
    #[arg(long)]
    m: usize,
    /// Training SNR in dB.
    #[arg(long, allow_hyphen_values = true)]
    snr: f64,
    /// Monte-Carlo trials.
    #[arg(long, default_value_t = experiment::DEFAULT_TRIALS)]
    trials: usize,
    /// Master seed.
    #[arg(long, default_value_t = experiment::DEFAULT_SEED)]
    seed: u64,
    /// Spec file providing the system configuration.
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    /// Training SNR in dB.
    #[arg(long, allow_hyphen_values = true)]
    snr: f64,
    /// Spec file providing the system configuration.
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Monte-Carlo trials per check.
    #[arg(long, default_value_t = experiment::DEFAULT_TRIALS)]
    trials: usize,
    /// Spec file providing the system configuration.
    #[arg(long)]
    spec: Option<PathBuf>,
}

/// Clap-friendly wrapper so `--estimator` errors are usage errors.
#[derive(Clone)]
struct EstimatorTag(EstimatorKind);

impl std::str::FromStr for EstimatorTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.parse::<EstimatorKind>()
            .map(EstimatorTag)
            .map_err(|e| e.to_string())
    }
}

/// A failure annotated with the exit status it should produce.
struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 2,
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 1,
        }
    }
}

impl From<CoreError> for Failure {
    fn from(error: CoreError) -> Self {
        let code = match &error {
            CoreError::InvalidConfig(_)
            | CoreError::InvalidSpec(_)
            | CoreError::UnknownEstimator(_)
            | CoreError::Dimension(_)
            | CoreError::Range { .. } => 2,
            CoreError::Io { .. } | CoreError::DivisionByZero(_) => 1,
        };
        Self {
            message: error.to_string(),
            code,
        }
    }
}

impl From<specfile::SpecFileError> for Failure {
    fn from(error: specfile::SpecFileError) -> Self {
        Failure::usage(error.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_err()
        {
            eprintln!("error: thread pool already initialized");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Sweep(args) => run_sweep(args),
        Command::Eval(args) => run_eval(args),
        Command::Bound(args) => run_bound(args),
        Command::Verify(args) => run_verify(args),
    }
}

fn load_spec(path: Option<&Path>) -> Result<SweepSpec, Failure> {
    match path {
        Some(path) => Ok(specfile::load(path)?),
        None => Ok(SweepSpec::default_reproduction()),
    }
}

/// Relative output paths land in `$CHANEST_OUT_DIR` when the variable is
/// set; absolute paths are taken as given.
fn resolve_out(path: PathBuf) -> PathBuf {
    if path.is_absolute() {
        return path;
    }
    match env::var_os(OUT_DIR_VAR) {
        Some(dir) => Path::new(&dir).join(path),
        None => path,
    }
}

fn run_sweep(args: SweepArgs) -> Result<u8, Failure> {
    let mut spec = load_spec(args.spec.as_deref())?;
    if let Some(snr) = args.snr {
        spec.snr_grid_db = snr;
    }
    if let Some(m) = args.m {
        spec.m_grid = m;
    }
    if let Some(estimators) = args.estimator.as_deref() {
        spec.estimators = specfile::parse_estimators(estimators)?;
    }
    if let Some(trials) = args.trials {
        spec.n_trials = trials;
    }
    if let Some(seed) = args.seed {
        spec.master_seed = seed;
    }
    let report = chanest_core::run_sweep(&spec)?;
    let destination = resolve_out(args.out);
    experiment::emit_report(&report, &destination)?;
    println!(
        "wrote {} cells to {} (metadata: {})",
        report.cells().len(),
        destination.display(),
        experiment::sidecar_path(&destination).display()
    );
    Ok(0)
}

fn run_eval(args: EvalArgs) -> Result<u8, Failure> {
    if args.trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let spec = load_spec(args.spec.as_deref())?;
    let estimate = chanest_core::empirical_mse(
        args.estimator.0,
        args.m,
        args.snr,
        &spec.config,
        args.trials,
        args.seed,
    )?;
    println!(
        "estimator={} m={} snr_db={} mse_mean={} mse_std_error={} n_trials={}",
        args.estimator.0,
        args.m,
        fmt_sig9(args.snr),
        fmt_sig9(estimate.mean),
        fmt_sig9(estimate.std_error),
        estimate.n_trials
    );
    Ok(0)
}

fn run_bound(args: BoundArgs) -> Result<u8, Failure> {
    let spec = load_spec(args.spec.as_deref())?;
    let config = spec.config.at_snr_db(args.snr);
    let bound = mse_lower_bound(&config, 0);
    println!(
        "lower_bound={} quadrature_error={:.2e}",
        fmt_sig9(bound.value),
        bound.quadrature_error
    );
    Ok(0)
}

fn run_verify(args: VerifyArgs) -> Result<u8, Failure> {
    if args.trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let spec = load_spec(args.spec.as_deref())?;
    let options = VerifyOptions {
        n_trials: args.trials,
        seed: args.seed,
    };
    let outcomes = verify::run_all(&spec.config, &options)?;
    let mut failures = 0;
    for outcome in &outcomes {
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{status} {}: {}", outcome.name, outcome.detail);
        if !outcome.passed {
            failures += 1;
        }
    }
    if failures > 0 {
        return Err(Failure::runtime(format!(
            "{failures} of {} checks failed",
            outcomes.len()
        )));
    }
    println!("all {} checks passed", outcomes.len());
    Ok(0)
}
