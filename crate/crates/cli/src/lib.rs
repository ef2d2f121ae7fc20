//! Command-line front end: computation commands, property campaigns and
//! reproducible JSON reports.

pub mod campaign;
pub mod commands;
pub mod config;
pub mod error;
pub mod input;
pub mod report;

pub use commands::run;
pub use config::{Cli, Command, RunConfig};
pub use error::{CliError, Result};
pub use report::{exit_code, Report};
