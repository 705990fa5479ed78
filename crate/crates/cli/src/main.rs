#![allow(clippy::result_large_err)]

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use trp::format::parse_instance;
use trp::online::StrategyKind;
use trp::scalar::parse_scalar;
use trp::{Instance, LineSegment, Model, QuadraticScalar, Scalar};
use trp_cli::{adversary, generate, oracle, run_sweep, simulate, AdversaryArgs, CliError, GenerateArgs, GeneratorKind, SimulateArgs, SweepSpec};

/// Online traveling repairperson on a line, with predicted locations.
#[derive(Debug, Parser)]
#[command(name = "trp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal offline tour over an instance's actual locations.
    Oracle {
        instance: PathBuf,
        /// Cross-check against exhaustive search (at most 9 requests).
        #[arg(long)]
        brute: bool,
    },
    /// Run a strategy on an instance and print per-request ratios as CSV.
    Simulate {
        instance: PathBuf,
        #[command(flatten)]
        strategy: StrategyOpts,
        /// Error bound for the robust strategy [default: the instance's largest error].
        #[arg(long, value_parser = scalar, allow_hyphen_values = true)]
        delta: Option<Scalar>,
        /// Exit with status 2 if a proven ratio is exceeded.
        #[arg(long)]
        certify: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a seeded instance file.
    Generate {
        /// random, perturbed or lowerbound.
        #[arg(value_parser = generator)]
        kind: GeneratorKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        line: LineOpts,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        max_arrival: u64,
        /// Locations lie on multiples of 1/grid.
        #[arg(long, default_value_t = 100)]
        grid: u64,
        /// Perturbation bound for `perturbed`.
        #[arg(long, value_parser = scalar, default_value = "0")]
        delta: Scalar,
        /// Write `MODEL original` instead of the default prediction model.
        #[arg(long)]
        original: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play the ratio-3 lower-bound game against a strategy.
    Adversary {
        #[command(flatten)]
        strategy: StrategyOpts,
        #[arg(long, value_parser = scalar, default_value = "0")]
        delta: Scalar,
        /// Number of epsilon requests the adversary may release.
        #[arg(long, default_value_t = 3)]
        epsilons: usize,
        /// Also write the step log as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Exit with status 2 if the strategy escapes.
        #[arg(long)]
        certify: bool,
    },
    /// Run strategies over seeded random instances and tabulate ratios.
    Sweep {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        /// Comma-separated relative errors δ; the instance error is δ·|L|.
        #[arg(long, value_parser = scalar, value_delimiter = ',', default_value = "0")]
        deltas: Vec<Scalar>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated strategy names.
        #[arg(long, value_parser = strategy, value_delimiter = ',', default_value = "halfline,perfect,robust,greedy")]
        strategies: Vec<StrategyKind>,
        #[command(flatten)]
        line: LineOpts,
        #[arg(long, default_value_t = 20)]
        max_arrival: u64,
        #[arg(long, value_parser = quadratic, default_value = "sqrt3/2")]
        alpha: QuadraticScalar,
        /// Exit with status 2 if any certified row fails.
        #[arg(long)]
        certify: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct StrategyOpts {
    /// halfline, perfect, robust or greedy.
    #[arg(long, value_parser = strategy)]
    strategy: StrategyKind,
    /// Trip-growth parameter, e.g. `sqrt3/2` or `0.8`.
    #[arg(long, value_parser = quadratic, default_value = "sqrt3/2")]
    alpha: QuadraticScalar,
}

#[derive(Debug, Args)]
struct LineOpts {
    #[arg(long, value_parser = scalar, default_value = "-10", allow_hyphen_values = true)]
    left: Scalar,
    #[arg(long, value_parser = scalar, default_value = "10", allow_hyphen_values = true)]
    right: Scalar,
}

impl LineOpts {
    fn segment(&self) -> Result<LineSegment, CliError> {
        LineSegment::new(self.left.clone(), self.right.clone()).map_err(|e| CliError::Usage(e.to_string()))
    }
}

fn scalar(s: &str) -> Result<Scalar, String> {
    parse_scalar(s.trim()).map_err(|e| e.to_string())
}

fn quadratic(s: &str) -> Result<QuadraticScalar, String> {
    s.parse().map_err(|e: trp::scalar::ScalarError| e.to_string())
}

fn strategy(s: &str) -> Result<StrategyKind, String> {
    s.trim().parse().map_err(|e: trp::online::StrategyError| e.to_string())
}

fn generator(s: &str) -> Result<GeneratorKind, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn read_instance(path: &Path) -> Result<Instance, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(parse_instance(&text)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Oracle { instance, brute } => emit(None, &oracle(&read_instance(&instance)?, brute)?),
        Command::Simulate { instance, strategy, delta, certify, out } => {
            let instance = read_instance(&instance)?;
            let args = SimulateArgs { strategy: strategy.strategy, alpha: strategy.alpha, delta, certify };
            let result = simulate(&instance, &args)?;
            emit(out.as_deref(), &result.csv)?;
            eprint!("{}", result.summary);
            if result.certified == Some(false) {
                return Err(CliError::Certification("certified bound exceeded".into()));
            }
            Ok(())
        }
        Command::Generate { kind, seed, line, n, max_arrival, grid, delta, original, out } => {
            let args = GenerateArgs {
                kind,
                seed,
                line: line.segment()?,
                n,
                max_arrival,
                grid,
                delta,
                model: if original { Model::Original } else { Model::Prediction },
            };
            emit(out.as_deref(), &generate(&args)?)
        }
        Command::Adversary { strategy, delta, epsilons, csv, certify } => {
            let args = AdversaryArgs { strategy: strategy.strategy, alpha: strategy.alpha, delta, epsilons };
            let result = adversary(&args)?;
            emit(None, &result.log)?;
            if let Some(path) = csv {
                fs::write(path, &result.csv)?;
            }
            if certify && result.transcript.escaped {
                return Err(CliError::Certification(format!("{} escaped the adversary", args.strategy)));
            }
            Ok(())
        }
        Command::Sweep { trials, n_min, n_max, deltas, seed, strategies, line, max_arrival, alpha, certify, out } => {
            let mut spec = SweepSpec::new(line.segment()?, strategies, deltas);
            spec.trials = trials;
            spec.n_min = n_min;
            spec.n_max = n_max;
            spec.seed = seed;
            spec.max_arrival = max_arrival;
            spec.alpha = alpha;
            let outcome = run_sweep(&spec)?;
            emit(out.as_deref(), &outcome.to_csv()?)?;
            if certify && !outcome.all_certified() {
                return Err(CliError::Certification("a certified bound was exceeded".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
