//! Ensemble drivers behind the `excursion-lab` CLI.

mod config;
mod convergence;
mod ensemble;
mod verify;

pub use config::ExperimentConfig;
pub use convergence::{
    run_convergence, write_convergence_csv, write_convergence_file, ConvergenceRow, BIN_WIDTHS,
    STEP_COUNTS,
};
pub use ensemble::{run_ensemble, run_simulate, simulate_path, write_csv, PathRecord};
pub use verify::{run_verify, suite_from_records, write_report, IdentitySuiteReport, NamedMoment};

pub(crate) fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}
