use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cran_pool::harness::{run_to_file, validate, ExperimentConfig, SweepAxis};

#[derive(Parser)]
#[command(name = "cran-pool", version, about = "Two-tenant C-RAN uplink spectrum pooling optimizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; defaults to the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a config with the sweep given on the command line.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// backhaul_capacity, privacy_threshold, snr_db or subset_size
        #[arg(long)]
        axis: SweepAxis,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the self-check suite on small random instances.
    Validate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(config: PathBuf, sweep: Option<(SweepAxis, Vec<f64>)>, out: Option<PathBuf>) -> cran_pool::Result<()> {
    let cfg = ExperimentConfig::load(&config)?;
    let spec = cfg.spec(sweep)?;
    let out = out
        .or_else(|| spec.output.clone())
        .ok_or_else(|| cran_pool::Error::Config("no output path: pass --out or set `output`".into()))?;
    let records = run_to_file(&spec, &out)?;
    let infeasible = records.iter().filter(|r| !r.feasible).count();
    eprintln!("wrote {} rows to {} ({infeasible} infeasible)", records.len(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out } => run(config, None, out),
        Command::Sweep { config, axis, values, out } => run(config, Some((axis, values)), out),
        Command::Validate { seed } => match validate(seed) {
            Ok(report) => {
                print!("{report}");
                return if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE };
            }
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
