//! `herald-sim`: evaluate, sweep, optimise and Monte Carlo check a heralded
//! single-photon source behind an asymmetric two-port bucket detector.
//!
//! Exit codes: 0 success, 1 invalid input or I/O failure, 2 degenerate
//! herald (no usable heralds), 3 Monte Carlo disagreement.

mod commands;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use herald_core::{Error, Param, Workers};

use crate::output::Format;

/// Caps worker threads for sweeps and Monte Carlo runs; 0 or unset means auto.
pub const THREADS_ENV: &str = "HERALD_SIM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "herald-sim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fidelity and heralding probability for one configuration.
    Fidelity(CommonArgs),
    /// Evaluate a 1-D or 2-D grid over eta_ref, loss and dark.
    Sweep(SweepArgs),
    /// Find the splitting ratio that maximises fidelity.
    Optimize(OptimizeArgs),
    /// Compare the analytic result with an event-level Monte Carlo run.
    McCheck(McArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Down-conversion strength, in [0, 1).
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    chi: f64,
    /// Beamsplitter reflectivity toward the heralding detector.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    eta_ref: f64,
    /// Per-photon loss probability of each detector.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    loss: f64,
    /// Dark-count probability per detector per window.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    dark: f64,
    /// Truncation tolerance for the photon-number sums.
    #[arg(long, default_value_t = herald_core::DEFAULT_TOLERANCE, allow_negative_numbers = true)]
    tolerance: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; `-` or `stdout` for standard output.
    #[arg(long, default_value = "-")]
    output: String,
    /// Leave the timestamp out of reports (for byte-identical reruns).
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    Fig1,
    Fig2,
    Fig3,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Built-in figure grid; used when no --axis is given (default fig1).
    #[arg(long, value_enum, conflicts_with = "axis")]
    preset: Option<Preset>,
    /// First swept parameter: eta_ref, loss or dark.
    #[arg(long, value_parser = parse_param, requires_all = ["from", "to"])]
    axis: Option<Param>,
    #[arg(long, allow_negative_numbers = true)]
    from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    to: Option<f64>,
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Logarithmic spacing for the first axis.
    #[arg(long)]
    log: bool,
    /// Optional second (inner) axis.
    #[arg(long, value_parser = parse_param, requires_all = ["axis", "from2", "to2"])]
    axis2: Option<Param>,
    #[arg(long, allow_negative_numbers = true)]
    from2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    to2: Option<f64>,
    #[arg(long, default_value_t = 50)]
    points2: usize,
    #[arg(long)]
    log2: bool,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Golden-section stopping width on eta_ref.
    #[arg(long, default_value_t = herald_core::analysis::DEFAULT_REFINE_TOL, allow_negative_numbers = true)]
    refine_tol: f64,
}

#[derive(Debug, Args)]
struct McArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn parse_param(s: &str) -> Result<Param, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Degenerate(String),
    McDisagreement,
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Degenerate(_) => 2,
            Failure::McDisagreement => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateHerald { .. } | Error::ZeroHeralds { .. } | Error::AllDegenerate => {
                Failure::Degenerate(e.to_string())
            }
            Error::InvalidParameter { .. } | Error::InvalidGrid(_) => {
                Failure::Invalid(e.to_string())
            }
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Invalid(format!("i/o error: {e}"))
    }
}

fn workers_from_env() -> Result<Workers, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(Workers::Auto),
        Ok(v) if v.trim().is_empty() => Ok(Workers::Auto),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Workers::from_cap)
            .map_err(|_| Failure::Invalid(format!("{THREADS_ENV}={v:?} is not a thread count"))),
    }
}

fn open_output(path: &str) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        "-" | "stdout" => Box::new(BufWriter::new(io::stdout().lock())),
        p => Box::new(BufWriter::new(
            File::create(PathBuf::from(p))
                .map_err(|e| Failure::Invalid(format!("cannot create {p}: {e}")))?,
        )),
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let workers = workers_from_env()?;
    match cli.command {
        Command::Fidelity(a) => commands::fidelity(&a),
        Command::Sweep(a) => commands::sweep(&a, workers),
        Command::Optimize(a) => commands::optimize(&a),
        Command::McCheck(a) => commands::mc_check(&a, workers),
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Invalid(msg) => eprintln!("error: {msg}"),
                Failure::Degenerate(msg) => eprintln!("error: {msg}"),
                Failure::McDisagreement => {
                    eprintln!("FAIL: Monte Carlo estimate disagrees with the analytic value")
                }
            }
            ExitCode::from(f.exit_code())
        }
    }
}
