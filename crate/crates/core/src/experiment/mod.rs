//! Experiment configuration, Monte-Carlo runs and result files.

pub mod config;
pub mod output;
pub mod runner;

pub use config::{load_config, ConfigError, ExperimentSpec, MsChoice, PrecoderChoice, Scenario, SelectorChoice};
pub use output::{write_results, Format, ResultRow, CSV_HEADER};
pub use runner::{monte_carlo_sinr, run_experiment, run_experiment_with_threads, RunError};
