mod commands;
mod error;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chainmarket::simlab::{DEFAULT_INSTANCES, DEFAULT_SEED};
use chainmarket::DemandMode;

#[derive(Parser, Debug)]
#[command(
    name = "chainmarket",
    version,
    about = "Auctions of computing resources to proof-of-work miners"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Market parameters: defaults, then the config file, then overrides.
#[derive(Args, Debug)]
struct MarketArgs {
    /// Config file of `key = value` lines.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one parameter, e.g. `--set lambda=30`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, env = "CHAINMARKET_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; all cores when omitted.
    #[arg(long, value_name = "J")]
    jobs: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Constant,
    Multi,
}

impl From<Mode> for DemandMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Constant => DemandMode::Constant,
            Mode::Multi => DemandMode::Multi,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one auction on an instance file and write the outcome table.
    Auction {
        #[arg(long)]
        mechanism: String,
        /// Instance table with columns id,s,d[,b].
        #[arg(long, value_name = "PATH")]
        instance: PathBuf,
        #[command(flatten)]
        market: MarketArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Average welfare and satisfaction over random markets along a grid.
    Sweep {
        #[arg(long, default_value = "mdb")]
        mechanism: String,
        /// Named experiment; excludes --param and --grid.
        #[arg(long, conflicts_with_all = ["param", "grid"])]
        preset: Option<String>,
        /// Swept parameter: N, c, T, r, lambda, theta or none.
        #[arg(long, requires = "grid")]
        param: Option<String>,
        /// Comma-separated grid values.
        #[arg(long, value_delimiter = ',', requires = "param")]
        grid: Vec<f64>,
        /// Miners per market unless N is swept.
        #[arg(long, default_value_t = 300)]
        miners: usize,
        /// Demand regime; the mechanism's own regime when omitted.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Markets per grid point.
        #[arg(long, default_value_t = DEFAULT_INSTANCES)]
        instances: usize,
        #[command(flatten)]
        market: MarketArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Probe truthfulness, rationality, monotonicity and submodularity.
    Probe {
        #[arg(long, default_value = "mdb")]
        mechanism: String,
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 2)]
        min_miners: usize,
        #[arg(long, default_value_t = 120)]
        max_miners: usize,
        #[command(flatten)]
        market: MarketArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Replace payments with the full bid (negative control).
        #[arg(long, hide = true)]
        tamper_payments: bool,
    },
    /// Write a random truthful instance table.
    Gen {
        #[arg(long)]
        miners: usize,
        #[arg(long, value_enum, default_value = "multi")]
        mode: Mode,
        #[command(flatten)]
        market: MarketArgs,
        #[arg(long, env = "CHAINMARKET_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chainmarket: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
