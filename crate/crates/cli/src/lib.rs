//! Batch experiment runner over `slowent-core`: JSON configuration,
//! per-experiment runners, and JSON/CSV reports.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{ConfigFile, Experiment, ExperimentConfig, LawChoice};
pub use experiments::run;
pub use report::{Check, ExperimentReport, Relation};

/// Exit code for configuration, precondition and I/O errors.
pub const EXIT_ERROR: i32 = 2;
/// Exit code when an asserted check fails.
pub const EXIT_FAILED: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] slowent_core::Error),
    #[error("io: {0}")]
    Io(String),
}

/// Caps the global thread pool from `SLOWENT_THREADS`, if set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SLOWENT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Config(format!("SLOWENT_THREADS={raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}
