//! Config-driven experiment runner behind the `topofl` CLI.

mod config;
mod record;
mod runs;

pub use config::{ExperimentConfig, ScenarioSpec};
pub use record::{convergence_round, partial_path, RoundRecord, Table, MISSING, RECORD_HEADER};
pub use runs::{
    ablation_config, read_table, run_ablation, run_compare, run_drift_study, run_experiment, run_export,
    run_privacy_report, run_sweep, ABLATION_VARIANTS, HEADLINE_D, HEADLINE_GRAD_DIM, HEADLINE_N,
};
