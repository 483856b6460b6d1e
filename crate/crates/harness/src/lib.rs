//! Simulation harness: experiment drivers, configuration, result tables
//! and the `rootfind` command line.

pub mod config;
pub mod error;
pub mod experiments;
pub mod pool;
pub mod table;

pub use config::{DistSizes, ExperimentConfig, Format, Thresholds};
pub use error::{HarnessError, Result};
pub use pool::WorkerPool;
pub use table::{TrialRow, TrialTable};
