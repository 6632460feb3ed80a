//! Command-line front end for `mvdlm`: TOML configuration, CSV observations
//! with missing cells, filtering in either update mode and the simulated
//! comparison experiment.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;

pub use commands::{cmd_filter, cmd_simulate, run_filter, run_simulate, FilterArgs};
pub use config::RunConfig;
pub use error::{CliError, CliResult};
