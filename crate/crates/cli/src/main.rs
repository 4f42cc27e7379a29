use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use besovns_cli::{
    calibrate_command, exit_code, parse_config, run_command, verify_command, Context, RunConfig,
};
use clap::{Parser, Subcommand};

/// Pseudo-spectral Navier-Stokes runs with a Besov-norm regularity monitor.
///
/// Configs are INI-style files with sections [solver], [monitor] and
/// [output]; an empty file runs the defaults (n = 32, nu = 0.1, dt = 1e-3,
/// t_end = 1, Taylor-Green, all seven criteria with s = 0.2).
///
/// Exit status: 0 all criteria pass, 2 any fails, 3 any inconclusive (and
/// none fails), 1 usage or I/O error.
#[derive(Parser)]
#[command(name = "besovns", version)]
struct Cli {
    /// Base directory for a relative `[output] dir`.
    #[arg(long, global = true, env = "BESOVNS_OUTPUT_ROOT")]
    output_root: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver with the monitor and write timeseries.csv, report.csv,
    /// links.csv and timing.csv.
    Run {
        config: PathBuf,
        /// Run N seeds (seed, seed+1, ...) concurrently, each in its own
        /// seed-<k> subdirectory. Needs `init = random`.
        #[arg(long, value_name = "N")]
        ensemble: Option<u64>,
    },
    /// Calibrate the monitor's constants on the seeded ensemble and write
    /// constants.csv.
    Calibrate { config: PathBuf },
    /// Check the inequality chain on random fields and write
    /// inequalities.csv.
    VerifyInequalities { config: PathBuf },
}

fn load(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    parse_config(&text).with_context(|| format!("invalid config {}", path.display()))
}

fn execute(cli: Cli) -> Result<i32> {
    let ctx = |p: &Path| Context {
        config_dir: p.parent().map(Path::to_path_buf).unwrap_or_default(),
        output_root: cli.output_root.clone(),
    };
    Ok(match &cli.command {
        Command::Run { config, ensemble } => {
            exit_code(run_command(&load(config)?, &ctx(config), *ensemble)?)
        }
        Command::Calibrate { config } => {
            let path = calibrate_command(&load(config)?, &ctx(config))?;
            println!("wrote {}", path.display());
            0
        }
        Command::VerifyInequalities { config } => {
            exit_code(verify_command(&load(config)?, &ctx(config))?)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
