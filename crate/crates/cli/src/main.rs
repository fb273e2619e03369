use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use infosearch::sim::Schedule;
use infosearch_cli::commands::{capacity_report, plan_report, simulate, verify, SimulateOptions};
use infosearch_cli::config::ConfigFile;
use infosearch_cli::CliError;

#[derive(Parser)]
#[command(
    name = "infosearch",
    version,
    about = "Entropy-optimal adaptive search with noisy sensors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Joint,
    Sequential,
}

impl From<ScheduleArg> for Schedule {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::Joint => Schedule::Joint,
            ScheduleArg::Sequential => Schedule::Sequential,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Capacity and optimal operating point of one sensor.
    Capacity {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        sensor: String,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// First-stage sensing plan as JSON.
    Plan {
        #[arg(long)]
        config: PathBuf,
        /// Write plan.json into this directory instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo experiment; writes trajectories.csv and summary.csv.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        schedule: Option<ScheduleArg>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        stages: Option<usize>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Runs the invariant checks; exits 1 if any fails.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

/// Writes to stdout; a closed pipe ends output quietly.
fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(CliError::Io(e.to_string())),
        _ => Ok(()),
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Capacity {
            config,
            sensor,
            json,
        } => {
            let report = capacity_report(&ConfigFile::load(&config)?, &sensor)?;
            if json {
                emit(&(to_json(&report) + "\n"))?;
            } else {
                emit(&report.render())?;
            }
        }
        Command::Plan { config, out } => {
            let text = to_json(&plan_report(&ConfigFile::load(&config)?)?);
            match out {
                Some(dir) => {
                    let path = dir.join("plan.json");
                    std::fs::create_dir_all(&dir)
                        .and_then(|_| std::fs::write(&path, text + "\n"))
                        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                    emit(&format!("wrote {}\n", path.display()))?;
                }
                None => emit(&(text + "\n"))?,
            }
        }
        Command::Simulate {
            config,
            out,
            seed,
            schedule,
            reps,
            stages,
            threads,
        } => {
            let opts = SimulateOptions {
                out,
                seed,
                schedule: schedule.map(Schedule::from),
                reps,
                stages,
                threads,
            };
            let (_, summary) = simulate(&ConfigFile::load(&config)?, &opts)?;
            emit(&summary)?;
        }
        Command::Verify { config } => {
            let report = verify(&ConfigFile::load(&config)?)?;
            emit(&report.render())?;
            if report.failures() > 0 {
                return Err(CliError::VerificationFailed(report.failures()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
