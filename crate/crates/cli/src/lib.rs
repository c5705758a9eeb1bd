//! Config-driven experiments over `rodwave-core`: one TOML file per run,
//! a directory of artifacts per run, and a verdict recomputable from those
//! artifacts alone.

pub mod config;
pub mod experiment;
pub mod output;
mod real;
pub mod sweep;
pub mod verdict;

pub use config::{ExperimentConfig, Scenario};
pub use experiment::{reverdict, run_experiment, Outcome, RunOptions};
pub use verdict::Verdict;

/// Exit code for configuration and I/O errors.
pub const EXIT_CONFIG: i32 = 4;
