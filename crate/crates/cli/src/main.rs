use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use thinfilm::config::{Constants, RunConfig};
use thinfilm::diagnostics::verify_corpus;
use thinfilm::ensemble::{mass_drift_study, persist, run_ensemble, write_json};
use thinfilm::plots::{emit_mass_plot, emit_plots};
use thinfilm::Error;

/// Overrides the output directory of every subcommand that writes files.
const OUTPUT_ENV: &str = "THINFILM_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "thinfilm", version, about = "Stochastic thin-film simulation and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an ensemble of paths and write report, CSV data and plots.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Master seed; replaces `noise.seed`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the identity and inequality suite on the random field corpus.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Estimate the sup mass drift over `ensemble.h_list` and fit its slope.
    MassStudy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the derived scheme constants as JSON.
    Constants {
        #[arg(long)]
        config: PathBuf,
    },
}

enum Failure {
    Config(Error),
    Verification,
    Runtime(Error),
}

fn load(path: &Path) -> Result<RunConfig, Failure> {
    RunConfig::from_path(path).map_err(Failure::Config)
}

fn output_dir(flag: Option<PathBuf>, cfg: &RunConfig) -> Option<PathBuf> {
    flag.or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .or_else(|| cfg.ensemble.output_dir.clone())
}

fn print_json(value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.into()))?;
    println!("{text}");
    Ok(())
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Simulate {
            config,
            seed,
            out,
            workers,
        } => {
            let mut cfg = load(&config)?;
            if let Some(s) = seed {
                cfg.noise.seed = s;
            }
            if workers.is_some() {
                cfg.ensemble.workers = workers;
            }
            let grid = cfg.grid().map_err(Failure::Config)?;
            let run = run_ensemble(&cfg.ensemble, &cfg.model, &cfg.scheme, &cfg.noise, grid)
                .map_err(Failure::Runtime)?;
            if let Some(dir) = output_dir(out, &cfg) {
                persist(&run, &dir).map_err(Failure::Runtime)?;
                emit_plots(&run, &dir).map_err(Failure::Runtime)?;
                eprintln!("wrote results to {}", dir.display());
            } else {
                print_json(&run.report)?;
            }
            Ok(())
        }
        Command::Verify { config, samples } => {
            let mut cfg = load(&config)?;
            if let Some(n) = samples {
                cfg.verify.samples = n;
            }
            let report = verify_corpus(&cfg.verify, &cfg.model, &cfg.noise, cfg.grid.length)
                .map_err(Failure::Runtime)?;
            print_json(&report)?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::MassStudy { config, out } => {
            let cfg = load(&config)?;
            let study = mass_drift_study(&cfg.ensemble, &cfg.model, &cfg.scheme, &cfg.noise, cfg.grid.length)
                .map_err(|e| match e {
                    e @ (Error::TooFew { .. } | Error::Config { .. }) => Failure::Config(e),
                    e => Failure::Runtime(e),
                })?;
            if let Some(dir) = output_dir(out, &cfg) {
                std::fs::create_dir_all(&dir).map_err(|e| Failure::Runtime(Error::io(&dir, e)))?;
                write_json(&dir.join("mass_study.json"), &study).map_err(Failure::Runtime)?;
                emit_mass_plot(&study, &dir).map_err(Failure::Runtime)?;
            }
            print_json(&study)
        }
        Command::Constants { config } => {
            let cfg = load(&config)?;
            let c = Constants::for_run(&cfg).map_err(Failure::Config)?;
            print_json(&c)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
