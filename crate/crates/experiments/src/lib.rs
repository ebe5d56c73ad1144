//! Experiment harness for the ternary All-to-All schedules in `retri-core`:
//! configuration loading, grid sweeps, speedup heatmaps and the invariant
//! audit used by the `retri` binary.

pub mod config;
pub mod heatmap;
pub mod runner;
pub mod units;
pub mod verify;

pub use config::{ConfigError, ExperimentConfig, Overrides, Reconfigs, Series};
pub use runner::{run_single, run_sweep, SingleReport, Sweep, SweepRow};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] retri_core::Error),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("grid mismatch: {0}")]
    Grid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl RunError {
    /// Process exit status: 2 for configuration, 3 for verification, else 1.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Verification(_) => 3,
            _ => 1,
        }
    }
}
