//! Experiment configuration, Monte Carlo sweeps and CSV reports.

mod config;
mod report;
mod run;

pub use config::{
    parse_budget_list, BudgetRule, ExperimentSpec, FadingConfig, PerRelay, Sweep, SweepVariable,
    DEFAULT_METHODS, DEFAULT_M_GRID, DEFAULT_PT_GRID, SEED_ENV,
};
pub use report::{mean_stderr, to_csv, write_csv, SweepRow};
pub use run::{
    run_experiment, run_method, run_relay_sweep, trial_channel, trial_stream, SweepResult,
    TrialOutcome, TrialRecord, MAX_FAILURE_FRACTION,
};
