//! Batch orchestration for entrolab: experiment configs, verification
//! suites, reports and CSV output.

pub mod compare;
pub mod config;
pub mod error;
pub mod lock;
pub mod report;
pub mod run;
pub mod suites;

pub use compare::{compare, render_table, CompareRow};
pub use config::{ExperimentConfig, Suite};
pub use error::CliError;
pub use report::{RunReport, Status, SCHEMA_VERSION};
pub use run::{run, RunOptions, RunOutcome};

/// Environment variable that overrides `--jobs`.
pub const JOBS_ENV: &str = "ENTROLAB_JOBS";

/// Worker count: the environment wins over the flag; zero means rayon's default.
pub fn resolve_jobs(flag: Option<usize>) -> Result<usize, CliError> {
    match std::env::var(JOBS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::config(JOBS_ENV, format!("not a count: {v:?}"))),
        Err(_) => Ok(flag.unwrap_or(0)),
    }
}
