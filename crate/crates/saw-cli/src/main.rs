//! `saw`: batch front end for exact computations on weighted self-avoiding
//! walks over rhombic tilings — local weight tables, identity
//! verifications, partition sums, column-swap experiments, triangle
//! enumeration, bridge-decay tables, and critical contact fugacities.
//!
//! Every subcommand prints one JSON report to stdout (floats carry 17
//! significant digits) and can write CSV plot data to a file. Stdout is
//! byte-identical across runs for identical inputs; wall time goes to
//! stderr. Exit codes: 0 on success, 1 when an asserted residual exceeds
//! its tolerance (the offending residual is named on stderr), 2 on usage
//! or input errors.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand};
use saw_core::angle::{parse_angle, parse_angle_file, parse_angle_list};
use saw_core::tiling::AngleSequence;
use saw_core::SawError;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "saw",
    version,
    about = "Exact computations for weighted self-avoiding walks on rhombic tilings"
)]
struct Cli {
    /// Report format for stdout (only `json` is defined)
    #[arg(long, global = true, default_value = "json", value_parser = ["json"])]
    format: String,

    /// Cap the number of worker threads used for parameter sweeps
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the local plaquette weights at one tilt angle
    Weights(WeightsArgs),
    /// Verify an exact identity and compare its residual to a tolerance
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Compute boundary partition sums by enumeration or transfer matrix
    #[command(subcommand)]
    Partition(PartitionCommand),
    /// Weighted sum over walks joining two left-boundary rows
    TwoPoint(TwoPointArgs),
    /// Compare two-point sums before and after swapping adjacent columns
    SwapExperiment(SwapArgs),
    /// Enumerate the triangular domain at one level
    Triangle(TriangleArgs),
    /// Tabulate strip return and crossing sums with enumerated caps
    Bridges(BridgesArgs),
    /// Critical contact fugacity of a strip
    Yc(YcArgs),
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Connection weights across three-rhombus rearrangements
    Yb(YbArgs),
    /// Per-rhombus contour relation of the twisted walk sum
    Cr(CrArgs),
    /// Rectangle sum rule cos(3pi/8) A + B + D + E = 1
    RectIdentity(RectIdentityArgs),
    /// Contact-weighted rectangle sum rule at fugacity y
    FugacityIdentity(FugacityIdentityArgs),
}

#[derive(Subcommand)]
enum PartitionCommand {
    /// Brute-force enumeration on a finite rectangle
    Rect(PartitionRectArgs),
    /// Transfer-matrix series on the half-infinite strip
    Strip(PartitionStripArgs),
}

/// Column tilts; exactly one source must be given.
#[derive(Args, Clone)]
struct AngleArgs {
    /// Comma-separated tilts, e.g. "pi/3,1.1,2pi/3"
    #[arg(long, conflicts_with_all = ["angles_file", "theta"])]
    angles: Option<String>,

    /// File with one tilt per line (# starts a comment)
    #[arg(long, value_name = "PATH", conflicts_with = "theta")]
    angles_file: Option<PathBuf>,

    /// Single tilt, repeated --width times
    #[arg(long)]
    theta: Option<String>,

    /// Number of columns when --theta is used
    #[arg(long, default_value_t = 1, requires = "theta")]
    width: usize,
}

impl AngleArgs {
    fn resolve(&self) -> Result<AngleSequence, CliError> {
        self.try_resolve()?.ok_or_else(|| {
            CliError::Usage(
                "one of --angles, --angles-file or --theta is required".into(),
            )
        })
    }

    fn try_resolve(&self) -> Result<Option<AngleSequence>, CliError> {
        let thetas = match (&self.angles, &self.angles_file, &self.theta) {
            (Some(list), None, None) => parse_angle_list(list)?,
            (None, Some(path), None) => parse_angle_file(path)?,
            (None, None, Some(token)) => vec![parse_angle(token)?; self.width],
            (None, None, None) => return Ok(None),
            _ => unreachable!("clap conflict rules forbid mixed angle sources"),
        };
        Ok(Some(AngleSequence::new(thetas)?))
    }
}

#[derive(Args)]
struct WeightsArgs {
    /// Tilt angle, e.g. "pi/3" or "1.047"
    #[arg(long)]
    theta: String,
    /// Write the table as one CSV row to this file
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct YbArgs {
    /// Side length of the direction-gap grid
    #[arg(long, default_value_t = 20)]
    grid: u32,
    /// Number of extra random direction triples
    #[arg(long, default_value_t = 400)]
    random: u32,
    /// Seed for the random triples
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Largest acceptable residual
    #[arg(long, default_value_t = 1e-11)]
    tol: f64,
    /// Write one CSV row per checked triple to this file
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct CrArgs {
    #[command(flatten)]
    angles: AngleArgs,
    /// Rectangle half-height L (rows -L..=L)
    #[arg(long, default_value_t = 2)]
    half_height: i64,
    /// Contact fugacity on the right boundary (needs a pi/3 last tilt when not 1)
    #[arg(long)]
    fugacity: Option<f64>,
    /// Largest acceptable per-rhombus residual
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct RectIdentityArgs {
    #[command(flatten)]
    angles: AngleArgs,
    /// Rectangle half-height L (rows -L..=L)
    #[arg(long, default_value_t = 2)]
    half_height: i64,
    /// Largest acceptable residual
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct FugacityIdentityArgs {
    #[command(flatten)]
    angles: AngleArgs,
    /// Rectangle half-height L (rows -L..=L)
    #[arg(long, default_value_t = 1)]
    half_height: i64,
    /// Contact fugacity y > 0 on the right boundary
    #[arg(long)]
    fugacity: f64,
    /// Largest acceptable residual
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct PartitionRectArgs {
    #[command(flatten)]
    angles: AngleArgs,
    /// Rectangle half-height L (rows -L..=L)
    #[arg(long, default_value_t = 2)]
    half_height: i64,
    /// Weight per step of the walk
    #[arg(long, default_value_t = 1.0)]
    length_weight: f64,
    /// Contact fugacity on the left boundary
    #[arg(long, default_value_t = 1.0)]
    fugacity: f64,
}

#[derive(Args)]
struct PartitionStripArgs {
    #[command(flatten)]
    angles: AngleArgs,
    /// Contact fugacity on the left boundary
    #[arg(long, default_value_t = 1.0)]
    fugacity: f64,
}

#[derive(Args)]
struct TwoPointArgs {
    #[command(flatten)]
    angles: AngleArgs,
    /// Truncation half-height of the strip
    #[arg(long, default_value_t = 8)]
    half_height: i64,
    /// Starting left-boundary row
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    from: i64,
    /// Ending left-boundary row
    #[arg(long, allow_negative_numbers = true)]
    to: i64,
    /// Contact fugacity on the left boundary
    #[arg(long, default_value_t = 1.0)]
    fugacity: f64,
}

#[derive(Args)]
struct SwapArgs {
    #[command(flatten)]
    angles: AngleArgs,
    /// Zero-based left column of the adjacent pair to swap
    #[arg(long, default_value_t = 0)]
    column: usize,
    /// The two left-boundary rows of the two-point sum, comma separated
    #[arg(long, default_value = "0,1")]
    rows: String,
    /// Truncation heights to evaluate, comma separated
    #[arg(long, default_value = "1,2,4,8,16,32")]
    heights: String,
    /// Write one CSV row per height to this file
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct TriangleArgs {
    /// Triangle level; the side length is 2*level + 1
    #[arg(long)]
    level: usize,
    /// Largest acceptable residual of the triangle sum rule
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Write the summary as one CSV row to this file
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BridgesArgs {
    /// Largest strip width to tabulate
    #[arg(long, default_value_t = 6)]
    t_max: usize,
    /// Write one CSV row per width to this file
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct YcArgs {
    #[command(flatten)]
    angles: AngleArgs,
    /// Largest acceptable bracket width around the located fugacity
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Tabulate uniform pi/3 strips of widths 1..=N instead of one sequence;
    /// tilts given via the angle flags then serve as a mixed-tilt comparison
    #[arg(long, value_name = "N")]
    convergence: Option<usize>,
    /// Write one CSV row per width to this file (convergence mode)
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

/// CLI-level failure; decides the process exit code.
enum CliError {
    /// Bad flag combination or unparsable input: exit 2.
    Usage(String),
    /// The library refused the inputs or hit a cap: exit 2.
    Lib(SawError),
    /// Report files could not be written: exit 2.
    Io(String),
}

impl From<SawError> for CliError {
    fn from(e: SawError) -> Self {
        CliError::Lib(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    if let Some(jobs) = cli.jobs {
        saw_core::exec::limit_jobs(jobs as usize);
    }
    let started = Instant::now();
    match commands::run(&cli.command) {
        Ok(outcome) => {
            println!("{}", output::render_json(&outcome.report));
            eprintln!("# wall time: {:.3}s", started.elapsed().as_secs_f64());
            match outcome.violation {
                None => ExitCode::SUCCESS,
                Some(msg) => {
                    eprintln!("tolerance violation: {msg}");
                    ExitCode::from(1)
                }
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
