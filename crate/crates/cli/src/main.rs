//! `topofl` command-line front end for the experiment harness.
//!
//! Exit codes: 0 success, 2 configuration error (including bad arguments),
//! 3 runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use topofl::harness::{
    run_ablation, run_compare, run_drift_study, run_export, run_privacy_report, run_sweep, ExperimentConfig,
};
use topofl::TopoError;

#[derive(Parser)]
#[command(name = "topofl", version, about = "Topology-guided federated learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// All configured methods on every seed (compare.csv, compare_summary.csv).
    Compare(Common),
    /// Attack-rate sweep over `attack_rates` (sweep.csv).
    Sweep(Common),
    /// pTopoFL ablation variants (ablation.csv).
    Ablation(Common),
    /// Per-client signature drift over `drift_rounds` rounds (drift.csv).
    Drift(Common),
    /// Gradient vs descriptor leakage proxies (privacy.csv).
    Privacy(Common),
    /// Client datasets as CSV, one directory per seed.
    Export(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run a single seed (scenario and training).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> topofl::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            // an unreadable config file is the user's configuration problem
            Some(path) => ExperimentConfig::load(path).map_err(|e| match e {
                TopoError::Config(_) => e,
                other => TopoError::Config(other.to_string()),
            })?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg = cfg.with_seed(seed);
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(command: &Command) -> topofl::Result<PathBuf> {
    match command {
        Command::Compare(c) => run_compare(&c.resolve()?),
        Command::Sweep(c) => {
            let cfg = c.resolve()?;
            run_sweep(&cfg, &cfg.attack_rates)
        }
        Command::Ablation(c) => run_ablation(&c.resolve()?),
        Command::Drift(c) => {
            let cfg = c.resolve()?;
            run_drift_study(&cfg, cfg.drift_rounds)
        }
        Command::Privacy(c) => run_privacy_report(&c.resolve()?),
        Command::Export(c) => run_export(&c.resolve()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli.command) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &TopoError) -> u8 {
    if e.is_config() {
        2
    } else {
        3
    }
}
