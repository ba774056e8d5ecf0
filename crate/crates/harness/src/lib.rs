//! Experiment driver for the `trigapprox` library: configuration, seeded
//! class samples, order and chain experiments, CSV reports and plots.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod plots;
pub mod report;
pub mod sampling;

pub use config::{ConfigError, ExperimentConfig};
pub use experiments::{run_chain_experiment, run_order_experiment, ChainExperiment, ExperimentError};
pub use plots::emit_plots;
pub use report::{OrderReport, OrderRow};
