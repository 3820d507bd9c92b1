//! Experiment sweeps: instance assembly from a JSON config, solving with
//! warm starts between related rows, independent auditing of every solution,
//! and deterministic CSV and gnuplot output.
//!
//! Rows are grouped in (beta, seed) cells that run on up to
//! `GREENPLAN_THREADS` workers. Output is sorted before writing, so file
//! contents do not depend on the worker count unless a solver time limit is
//! set.

mod config;
mod instance;
mod output;
mod run;
mod siting;
mod tiny;

pub use instance::{InstanceFile, Verification};
pub use config::{ModeSpec, ModelOptions, RenewableConfig, ScenarioConfig};
pub use output::{
    renewable_dat, results_dat, to_csv, write_renewable, RENEWABLE_CSV, RENEWABLE_DAT, RESULTS_CSV, RESULTS_DAT, SITING_CSV, STORAGE_CSV,
    TIMINGS_LOG,
};
pub use run::{
    fill_savings, renewable_cell, run_renewable_sweep, run_sweep, solve_job, tnre_non_increasing, worker_count,
    ExperimentRow, Job, JobResult, RenewableRow, StorageRow, SweepOutput, OBJECTIVE_TOL, THREADS_ENV,
};
pub use siting::{report_siting, SitingReport};
pub use tiny::{golden_instance, tiny_instance, TinyInstance, GOLDEN_NETWORK_W};
