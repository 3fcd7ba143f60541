use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use skytilt_cli::report::{run_report, ReportOptions};
use skytilt_cli::simulate::run_simulate;
use skytilt_cli::track::{parse_methods, run_track, Method, TrackOptions};
use skytilt_cli::CliError;

#[derive(Parser)]
#[command(
    name = "skytilt",
    about = "Vision-aided roll/pitch estimation: simulate scenarios, run trackers, aggregate results"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scenario directory (trajectory, masks, sensor streams).
    Simulate {
        /// Scenario configuration file (flat `key = value`).
        #[arg(long)]
        config: PathBuf,
        /// Output scenario directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run estimation methods over a scenario and write per-frame/summary CSVs.
    Track {
        #[arg(long = "scenario-dir")]
        scenario_dir: PathBuf,
        /// Comma-separated subset of imu,skyline,ground,fusion (default all;
        /// an empty string selects none).
        #[arg(long)]
        methods: Option<String>,
        /// Per-frame CSV path; the summary lands next to it as `<stem>_summary.csv`.
        #[arg(long)]
        out: PathBuf,
        /// Seed for the stochastic components (filter, triplet selection).
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Aggregate run summaries into `<out>_aggregate.csv` and `<out>_plot.csv`.
    Report {
        /// Output prefix for the aggregate and plot-data files.
        #[arg(long)]
        out: PathBuf,
        /// Run summary CSVs produced by `track`.
        #[arg(required = true)]
        runs: Vec<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, out } => run_simulate(&config, &out),
        Command::Track { scenario_dir, methods, out, seed } => {
            let methods = match methods {
                None => Method::ALL.to_vec(),
                Some(spec) => parse_methods(&spec)?,
            };
            run_track(&TrackOptions { scenario_dir, methods, out, seed }).map(|_| ())
        }
        Command::Report { out, runs } => run_report(&ReportOptions { inputs: runs, out_prefix: out }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("skytilt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
