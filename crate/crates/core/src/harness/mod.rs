//! Experiment harness: configs, multi-seed runs, report files, and scoring
//! of external predictions.

pub mod config;
pub mod eval;
pub mod report;
pub mod runner;

pub use config::{ExperimentConfig, Format, Method};
pub use eval::{evaluate_file, read_predictions, ScoreKind};
pub use report::emit_reports;
pub use runner::{
    load_dataset, run_experiment, run_method, run_scaling, ExperimentOutcome, MethodAggregate, RunRecord,
};
