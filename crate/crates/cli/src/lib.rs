//! Experiment runner for the helmbie boundary-integral toolkit: each
//! subcommand produces a [`table::Table`] rendered as CSV or JSON.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

use std::fs;

pub use config::{Cli, Command, Format};
pub use error::CliError;
use table::Table;

/// Runs the parsed command line and writes the table.  Returns the table
/// so callers can inspect it (e.g. to choose the exit status).
pub fn execute(cli: &Cli) -> Result<Table, CliError> {
    let table = commands::run(&cli.command, cli.config.as_deref())?;
    let text = match cli.format {
        Format::Csv => table.to_csv()?,
        Format::Json => table.to_json(),
    };
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(table)
}
