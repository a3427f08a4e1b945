use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use germoid::experiments::{self, ExperimentReport, DEFAULT_SEED};
use germoid::par::Execution;

/// Exact experiments on groupoids of germs and finite groupoid algebras.
#[derive(Parser)]
#[command(name = "germoid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for all randomized trials.
    #[arg(long, env = "GERMOID_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Also write the report as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Klein-group cross: the central element f and its ideal.
    Cross {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Alternating star: commutant, bi-transitivity and the normalizer u.
    Star {
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Permutation in cycle notation, e.g. "(1 2)".
        #[arg(long, default_value = "(1 2)")]
        tau: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Hausdorff and principality diagnostics for a star spec file.
    Diagnose {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Structural and norm checks on a finite groupoid spec file.
    Finite {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// All invariant suites at reduced size.
    Selftest {
        #[command(flatten)]
        common: Common,
    },
}

fn read_spec(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: Cli) -> Result<(ExperimentReport, Option<PathBuf>)> {
    let (report, common) = match cli.command {
        Command::Cross { trials, common } => (experiments::run_cross(trials, common.seed, common.exec())?, common),
        Command::Star { n, tau, trials, common } => (experiments::run_star(n, &tau, trials, common.seed)?, common),
        Command::Diagnose { spec, common } => {
            let text = read_spec(&spec)?;
            (experiments::run_diagnose(&text).with_context(|| format!("in {}", spec.display()))?, common)
        }
        Command::Finite { spec, trials, common } => {
            let text = read_spec(&spec)?;
            let report = experiments::run_finite(&text, trials, common.seed, common.exec())
                .with_context(|| format!("in {}", spec.display()))?;
            (report, common)
        }
        Command::Selftest { common } => (experiments::run_selftest(common.seed, common.exec())?, common),
    };
    Ok((report, common.json))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok((report, json)) => {
            print!("{}", report.render_text());
            if let Some(path) = json {
                if let Err(e) = fs::write(&path, report.to_json()) {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(report.outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
