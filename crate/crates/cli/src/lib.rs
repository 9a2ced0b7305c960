//! Command-line front end for the rumor models: runs, sweeps, CSV and SVG output.

pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod table;

pub use commands::{run, Cli};
pub use error::CliError;
