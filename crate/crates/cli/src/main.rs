//! `tlmcheck`: seeded verification suites and norm evaluations on periodic grids.
//!
//! Exit status: 0 when every check passes, 1 on a failed or undecided check,
//! 2 on invalid arguments, 3 on file or format errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tlm_core::{Error, WindowShape};

#[derive(Debug, Parser)]
#[command(
    name = "tlmcheck",
    version,
    about = "Morrey and Triebel-Lizorkin-Morrey checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every verification suite.
    VerifyAll(SuiteArgs),
    /// Exact and calibrated scalar lemmas only.
    ScalarSuite(SuiteArgs),
    /// Vector maximal inequality and projection stability only.
    MaximalSuite(SuiteArgs),
    /// Record pilot constants for the calibrated checks.
    Calibrate(CalibrateArgs),
    /// Morrey norm of one function.
    MorreyNorm(MorreyArgs),
    /// Triebel-Lizorkin-Morrey norm of one function, with per-block norms.
    TlmNorm(TlmArgs),
    /// Partial-sum tails and truncated square-function sequences of one function.
    DiamondCheck(DiamondArgs),
    /// Trace of one analytic interpolation family.
    InterpDemo(InterpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Windows {
    Ball,
    Cube,
}

impl From<Windows> for WindowShape {
    fn from(w: Windows) -> Self {
        match w {
            Windows::Ball => WindowShape::Ball,
            Windows::Cube => WindowShape::Cube,
        }
    }
}

/// `dyadic`, `linear`, or a comma-separated list of radii.
#[derive(Debug, Clone, PartialEq)]
enum Radii {
    Dyadic,
    Linear,
    List(Vec<f64>),
}

fn parse_radii(s: &str) -> Result<Radii, String> {
    match s {
        "dyadic" => Ok(Radii::Dyadic),
        "linear" => Ok(Radii::Linear),
        _ => s
            .split(',')
            .map(|r| {
                r.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("radius {r:?}: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Radii::List),
    }
}

#[derive(Debug, Clone, Args)]
struct GridArgs {
    /// Spatial dimension.
    #[arg(long = "grid-n", default_value_t = 1)]
    dim: usize,
    /// Points per axis.
    #[arg(long = "grid-points", default_value_t = 256)]
    points: usize,
    /// Period of each axis.
    #[arg(long = "grid-length", default_value_t = 2.0 * std::f64::consts::PI)]
    length: f64,
    /// Highest Littlewood-Paley index.
    #[arg(long = "jmax", default_value_t = 6)]
    j_max: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    /// Write the JSON report here (atomically) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep wall-clock fields in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Clone, Args)]
struct SuiteArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Windows::Cube)]
    windows: Windows,
    #[arg(long, value_parser = parse_radii, default_value = "dyadic")]
    radii: Radii,
    /// Random functions in corpora without a fixed size.
    #[arg(long, default_value_t = 50)]
    functions: usize,
    /// Baseline constants file; the bundled baseline when omitted.
    #[arg(long)]
    baseline: Option<PathBuf>,
    #[arg(long, default_value_t = tlm_core::report::REGRESSION_TOLERANCE)]
    baseline_tolerance: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
struct CalibrateArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Windows::Cube)]
    windows: Windows,
    #[arg(long, value_parser = parse_radii, default_value = "dyadic")]
    radii: Radii,
    #[arg(long, default_value_t = 50)]
    functions: usize,
    /// Destination TOML file.
    #[arg(long)]
    out: PathBuf,
    /// Replace an existing file.
    #[arg(long)]
    force: bool,
    /// Provenance date; today's local date when omitted.
    #[arg(long)]
    date: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Sample {
    /// Indicator of the ball of radius `--sample-radius` about the origin.
    BallIndicator,
    /// Seeded band-limited function.
    Random,
    /// Blocks that persist up to the top index.
    PersistentBlock,
}

#[derive(Debug, Clone, Args)]
struct InputArgs {
    /// Grid function file (`.csv` or binary); replaces the grid flags.
    #[arg(long, conflicts_with = "sample")]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    sample: Option<Sample>,
    #[arg(long, default_value_t = 1.0)]
    sample_radius: f64,
    /// Band exponent of random samples; `jmax - 1` when omitted.
    #[arg(long)]
    band: Option<i32>,
}

#[derive(Debug, Clone, Args)]
struct SamplerArgs {
    #[arg(long, value_enum)]
    windows: Option<Windows>,
    #[arg(long, value_parser = parse_radii)]
    radii: Option<Radii>,
    /// Scan every `stride`-th center along each axis.
    #[arg(long, default_value_t = 1)]
    stride: usize,
}

#[derive(Debug, Clone, Args)]
struct MorreyArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
struct SpaceArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    /// Second smoothness index; `inf` allowed.
    #[arg(long, default_value_t = 2.0)]
    r: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
struct TlmArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
struct DiamondArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[command(flatten)]
    space: SpaceArgs,
    /// Indicator thresholds `a` in (0, 1), comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.25")]
    a: Vec<f64>,
    /// Tail starts `J`; `0..=jmax` when omitted.
    #[arg(long = "j", value_delimiter = ',')]
    j: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Rho,
    Aggregate,
}

#[derive(Debug, Clone, Args)]
struct InterpArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    sampler: SamplerArgs,
    /// One of the built-in setups; ignored when the endpoint flags are given.
    #[arg(long, default_value_t = 0)]
    setup: usize,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    p0: Option<f64>,
    #[arg(long)]
    q0: Option<f64>,
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s0: Option<f64>,
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    q1: Option<f64>,
    #[arg(long)]
    r1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s1: Option<f64>,
    #[arg(long, value_enum, default_value_t = Family::Aggregate)]
    family: Family,
    #[command(flatten)]
    output: OutputArgs,
}

/// Failure that maps onto one exit status.
#[derive(Debug)]
pub(crate) enum Failure {
    Checks(String),
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let text = e.to_string();
        match e {
            Error::Io(_) | Error::Format(_) | Error::BaselineExists(_) => Failure::Io(text),
            Error::BandNotCovered { .. }
            | Error::NonFinite { .. }
            | Error::QuadratureDiverged { .. } => Failure::Checks(text),
            _ => Failure::Usage(text),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Checks(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
