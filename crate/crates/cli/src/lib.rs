//! Scenario-driven runner around `qtransfer-core`.

pub mod error;
pub mod output;
pub mod pipeline;
pub mod scenario;
pub mod suite;

pub use error::{CliError, CliResult};
pub use pipeline::{run_loaded, run_scenario, RunOptions, RunReport, Stages};
pub use scenario::Scenario;
