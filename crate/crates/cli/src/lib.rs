//! Command-line front end: config parsing, grid sweeps, single-point reports
//! and verification suites.

pub mod config;
pub mod error;
pub mod show;
pub mod sweep;
pub mod verify;

pub use error::{CliError, CliResult};
