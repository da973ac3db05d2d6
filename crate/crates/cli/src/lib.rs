//! Command-line front end for the damped gradient-system toolkit: config
//! parsing, run orchestration, CSV output and SVG phase portraits.

// validation guards are written `!(x > 0.0)` so NaN inputs fail them too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod reproduce;
pub mod svg;

pub use args::Cli;
pub use error::CliError;

pub fn run(cli: Cli) -> Result<(), CliError> {
    commands::dispatch(cli.command)
}
