use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use coex::commands::{self, SimOptions, Tolerances};
use coex::spec::SweepSpec;
use coex::table::{config_hash, emit, Table};
use coex::{CliError, Result};
use coex_core::fairness::FairnessMode;
use serde_json::json;
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(
    name = "coex",
    version,
    about = "LTE-U / Wi-Fi coexistence model, simulator and fairness solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the analytical model over a sweep.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the discrete-event simulator over a sweep.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        runs: u32,
        #[arg(long = "sim-time-s", default_value_t = 200.0)]
        sim_time_s: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long = "warmup-s", default_value_t = 1.0)]
        warmup_s: f64,
        /// Write per-run event traces next to the output.
        #[arg(long)]
        trace: bool,
    },
    /// Solve for the fair LTE duty cycle at each n_w of the sweep.
    Fairness {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Only this fairness notion; otherwise every one the sweep enables.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Compare two result tables, typically analytical against simulated.
    Compare {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Absolute tolerance on collision probabilities.
        #[arg(long, default_value_t = 0.03)]
        tolerance: f64,
        /// Relative tolerance on throughput.
        #[arg(long = "tput-rel-tolerance", default_value_t = 0.07)]
        tput_rel_tolerance: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Access,
    Throughput,
}

fn trace_dir(out: Option<&Path>) -> PathBuf {
    match out {
        Some(p) => {
            let mut name = p.file_name().unwrap_or_default().to_os_string();
            name.push(".trace");
            p.with_file_name(name)
        }
        None => PathBuf::from("coex.trace"),
    }
}

fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Analyze { config, out } => {
            let spec = SweepSpec::load(&config)?;
            let table = commands::analyze(&spec)?;
            let hash = config_hash(&json!({"command": "analyze", "spec": spec}))?;
            emit(out.as_deref(), &table.to_csv(&hash)?)
        }
        Command::Simulate {
            config,
            out,
            runs,
            sim_time_s,
            seed,
            warmup_s,
            trace,
        } => {
            let spec = SweepSpec::load(&config)?;
            let opts = SimOptions {
                runs,
                sim_time: sim_time_s,
                seed,
                warmup: warmup_s,
                trace_dir: trace.then(|| trace_dir(out.as_deref())),
            };
            let (table, _) = commands::simulate(&spec, &opts)?;
            let hash = config_hash(&json!({"command": "simulate", "spec": spec, "options": opts}))?;
            emit(out.as_deref(), &table.to_csv(&hash)?)
        }
        Command::Fairness { config, out, mode } => {
            let spec = SweepSpec::load(&config)?;
            let only = mode.map(|m| match m {
                ModeArg::Access => FairnessMode::Access,
                ModeArg::Throughput => FairnessMode::Throughput,
            });
            let modes = commands::fairness_modes(&spec, only)?;
            let table = commands::fairness(&spec, &modes)?;
            let names: Vec<&str> = modes.iter().map(|&m| commands::mode_name(m)).collect();
            let hash = config_hash(&json!({"command": "fairness", "spec": spec, "modes": names}))?;
            emit(out.as_deref(), &table.to_csv(&hash)?)
        }
        Command::Compare {
            left,
            right,
            out,
            tolerance,
            tput_rel_tolerance,
        } => {
            let tol = Tolerances {
                probability: tolerance,
                throughput: tput_rel_tolerance,
            };
            if !(tol.probability >= 0.0 && tol.throughput >= 0.0) {
                return Err(CliError::Usage("tolerances must be non-negative".into()));
            }
            let report = commands::compare(&Table::read(&left)?, &Table::read(&right)?, tol)?;
            let hash = config_hash(&json!({
                "command": "compare",
                "left": file_digest(&left)?,
                "right": file_digest(&right)?,
                "tolerances": tol,
            }))?;
            if let Some(path) = &out {
                emit(Some(path), &report.joined.to_csv(&hash)?)?;
            }
            for (metric, dev) in &report.max_deviation {
                println!("max deviation {metric}: {dev}");
            }
            if report.failures.is_empty() {
                println!("all {} rows within tolerance", report.joined.rows.len());
                Ok(())
            } else {
                for f in &report.failures {
                    eprintln!("{f}");
                }
                Err(CliError::Tolerance(format!(
                    "{} deviations outside tolerance",
                    report.failures.len()
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("coex: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
