//! `enttime`: entanglement timescales from the command line.
//!
//! Exit codes: 0 ok, 1 i/o, 2 invalid spec or flags, 3 model error,
//! 4 numerical failure or a failed verification.

mod commands;
mod error;
mod output;
mod report;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use enttime::EntropyOrder;

use crate::commands::{EvolveOptions, Stamp};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "enttime", version, about = "Entanglement timescales of bipartite quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON model specification.
    #[arg(long)]
    spec: PathBuf,

    /// Comma-separated entropy orders; `1` or `vn` is von Neumann.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    alphas: Vec<EntropyOrder>,

    /// Output file, written atomically. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute T_ent and the predicted curvatures without evolving.
    Timescale {
        #[command(flatten)]
        common: Common,
        /// Leave out the timestamp and wall time.
        #[arg(long)]
        reproducible: bool,
    },
    /// Entropy time series as CSV.
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Final time in the spec's time units. Defaults to 3 / rate.
        #[arg(long)]
        t_max: Option<f64>,
        /// Grid points including t = 0.
        #[arg(long, default_value_t = 301)]
        points: usize,
        /// Report entropies in units of ln 2.
        #[arg(long)]
        ln2_units: bool,
        /// Add the reduced eigenvalues p1, p2 (qubit subsystems only).
        #[arg(long)]
        spectra: bool,
    },
    /// Compare predicted and measured curvatures.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Relative tolerance for the curvature checks.
        #[arg(long, default_value_t = 0.01)]
        tolerance: f64,
        /// Leave out the timestamp and wall time.
        #[arg(long)]
        reproducible: bool,
        /// Also write the JSON report here; the table always goes to stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("ENTTIME_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Schema(format!("ENTTIME_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Io(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Timescale { common, reproducible } => {
            let stamp = Stamp::new(reproducible);
            let model = spec::load(&common.spec)?.resolve()?;
            let json = commands::timescale(&model, &common.alphas, &stamp)?;
            output::emit(common.out.as_deref(), &json)
        }
        Command::Evolve { common, t_max, points, ln2_units, spectra } => {
            let model = spec::load(&common.spec)?.resolve()?;
            let opts = EvolveOptions { t_max, points, ln2_units, spectra };
            let csv = commands::evolve(&model, &common.alphas, &opts)?;
            output::emit(common.out.as_deref(), &csv)
        }
        Command::Verify { common, tolerance, reproducible, json } => {
            let stamp = Stamp::new(reproducible);
            let model = spec::load(&common.spec)?.resolve()?;
            let report = commands::verify(&model, &common.alphas, tolerance, &stamp)?;
            let table = report.table();
            output::emit(common.out.as_deref(), &table)?;
            if let Some(path) = json {
                let mut text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
                text.push('\n');
                output::emit(Some(&path), &text)?;
            }
            if report.all_pass {
                Ok(())
            } else {
                Err(CliError::Numeric("at least one verification check failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("enttime: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
