//! Library half of the `coopgame` binary: argument parsing, file formats and
//! report rendering. [`run`] maps an argument vector to an exit code and
//! output streams, so the whole command surface can be tested in-process.

pub mod commands;
pub mod files;
pub mod render;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coopgame::{GameError, Tolerance};

/// Environment variable overriding the comparison tolerance of `check` commands.
pub const TOLERANCE_ENV: &str = "COOPGAME_TOLERANCE";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error in {origin} at line {line}, column {column}: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid input: {0}")]
    Validation(GameError),
    #[error("{0}")]
    Domain(#[from] GameError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "coopgame", version, about = "Coalitional game solvers")]
pub struct Cli {
    /// Print machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a solution concept.
    #[command(subcommand)]
    Solve(SolveCmd),
    /// Test a property of a game or an allocation.
    #[command(subcommand)]
    Check(CheckCmd),
    /// Coalition formation.
    #[command(subcommand)]
    Form(FormCmd),
    /// Relay tree formation.
    #[command(subcommand)]
    Netform(NetformCmd),
    /// Write a generated game file to stdout.
    #[command(subcommand)]
    Scenario(ScenarioCmd),
    /// Partition counting.
    #[command(subcommand)]
    Partitions(PartitionsCmd),
}

#[derive(Debug, Subcommand)]
pub enum SolveCmd {
    /// Shapley value, exact or by permutation sampling.
    Shapley {
        game: PathBuf,
        /// Estimate from this many random orders instead of solving exactly.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Nucleolus {
        game: PathBuf,
    },
    /// Core nonemptiness with a sample core point.
    Core {
        game: PathBuf,
    },
    /// Myerson value for a communication graph file.
    Myerson {
        game: PathBuf,
        graph: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct AllocationArg {
    pub game: PathBuf,
    /// Payoffs, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub x: Vec<f64>,
}

#[derive(Debug, Subcommand)]
pub enum CheckCmd {
    Superadditive { game: PathBuf },
    Convex { game: PathBuf },
    Balanced { game: PathBuf },
    Imputation(AllocationArg),
    Kernel(AllocationArg),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Utilitarian,
    Pareto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PayoffArg {
    Equal,
    Shapley,
    Nucleolus,
    /// Every member receives the coalition's worth.
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Singletons,
    Grand,
    File,
}

#[derive(Debug, Args)]
pub struct OrderArgs {
    #[arg(long, value_enum, default_value = "utilitarian")]
    pub order: OrderArg,
    /// Division rule used by the Pareto order.
    #[arg(long, value_enum, default_value = "equal")]
    pub payoff: PayoffArg,
}

#[derive(Debug, Subcommand)]
pub enum FormCmd {
    /// Merge-and-split dynamics from an initial partition.
    MergeSplit {
        game: PathBuf,
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long, value_enum, default_value = "singletons")]
        init: InitArg,
        /// Partition file, required with `--init file`.
        #[arg(long, required_if_eq("init", "file"))]
        partition: Option<PathBuf>,
    },
    /// Runs merge-and-split from every partition and reports whether all agree.
    DcCheck {
        game: PathBuf,
        #[command(flatten)]
        order: OrderArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum NetformCmd {
    /// Best-response formation from the star topology.
    Run { layout: PathBuf },
    /// Whether a network file with parents is a Nash network.
    Check { network: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum ScenarioCmd {
    /// Three-player majority vote.
    Majority,
    Bankruptcy {
        #[arg(long, value_delimiter = ',', required = true)]
        claims: Vec<f64>,
        #[arg(long)]
        estate: f64,
    },
    /// Gaussian multiple-access channel under jamming.
    Mac {
        #[arg(long, value_delimiter = ',', required = true)]
        powers: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
    },
    /// Virtual MIMO with local exchange cost.
    Mimo {
        /// Positions as `x:y`, comma separated.
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_point, allow_hyphen_values = true)]
        positions: Vec<[f64; 2]>,
        #[arg(long, default_value_t = 1.0)]
        budget: f64,
        #[arg(long, default_value_t = 2.0)]
        exponent: f64,
        #[arg(long, default_value_t = 0.01)]
        exchange_scale: f64,
        #[arg(long, default_value_t = 4)]
        rx_antennas: usize,
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
    },
    /// Cooperative spectrum sensing with OR fusion.
    Css {
        #[arg(long, value_delimiter = ',', required = true)]
        miss: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        false_alarm: Vec<f64>,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum PartitionsCmd {
    /// Bell number of `n`.
    Count {
        #[arg(long)]
        n: usize,
    },
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let (x, y) = s
        .split_once(':')
        .ok_or_else(|| format!("expected x:y, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok([num(x)?, num(y)?])
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Tolerance from [`TOLERANCE_ENV`], if set. `None` leaves each check at
/// its library default.
pub fn tolerance_from_env(value: Option<&str>) -> Result<Option<Tolerance>, CliError> {
    match value {
        None => Ok(None),
        Some(s) => match s.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(Some(Tolerance(t))),
            _ => Err(CliError::Usage(format!(
                "{TOLERANCE_ENV} must be a positive number, got {s:?}"
            ))),
        },
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, env_tolerance: Option<&str>) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let result = tolerance_from_env(env_tolerance).and_then(|tol| commands::execute(&cli, tol));
    match result {
        Ok(stdout) => Output {
            code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Output {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
