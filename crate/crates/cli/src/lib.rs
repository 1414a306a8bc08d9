//! Command-line front end for the bolt sequencing planners.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::{execute, write_output, Artifact, Command, CommandOutput};
pub use config::{parse_config, parse_config_str, Method, OutputFormat, RunConfig};
pub use error::CliError;
