//! Experiment harness for robust mode decomposition: seeded sweeps over
//! noise level and decomposition settings, truth matching, scoring and
//! report artifacts.

pub mod harness;
pub mod report;
pub mod spec;

pub use harness::{
    assign_by_peak, run_experiment, run_experiment_with, run_file_experiment,
    run_nonlinear_experiment, run_sine_snr_experiment, RunOptions,
};
pub use report::{
    aggregate, mode_csvs, read_report, summary_csv, vital_sign_bands, write_report, Band,
    CellResult, ExperimentReport, RecoveredMode, SidebandCheck, TruthAggregate, TruthScore,
    REPORT_SCHEMA_VERSION, SUMMARY_HEADER,
};
pub use rmd_core::io::load_signal_csv;
pub use spec::{ExperimentSpec, FileSpec, Generator, SineMixtureSpec, Tolerances, DEFAULT_K};
