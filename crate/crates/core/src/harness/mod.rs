//! Experiment configuration, execution and CSV output.

mod config;
mod run;

pub use config::{
    Algorithm, DomainSpec, ExperimentConfig, PartialExperimentConfig, SweepAxis, SweepConfig, W1Spec, DEFAULT_DELTA,
};
pub use run::{
    execute, run_experiment, run_sweep, write_summary, write_trace_csv, ExperimentResult, MAX_DEFAULT_ROUNDS,
};
