//! Command-line front end for `bergtoric-core`: TOML experiment
//! configurations, a content-addressed cache of norm tables, and CSV/JSON
//! outputs.
//!
//! Every subcommand reads one [`config::ExperimentConfig`] and writes its
//! results under `output.dir`. Failures map to exit codes through
//! [`error::CliError::exit_code`].

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod validate;

pub use commands::Report;
pub use config::ExperimentConfig;
pub use error::CliError;
