pub mod billiards;
pub mod coercivity;
pub mod gmres_bench;
pub mod mie;
pub mod poles;
pub mod sharpness;
pub mod sweep;

use std::path::Path;

use helmbie::linalg::fit_power_law;

use crate::config::{merged, Command};
use crate::error::CliError;
use crate::table::{Cell, Table};

/// Runs a subcommand with options merged from the optional config file.
pub fn run(command: &Command, config: Option<&Path>) -> Result<Table, CliError> {
    match command {
        Command::Sweep(a) => sweep::run(&merged(a, config)?),
        Command::Sharpness(a) => sharpness::run(&merged(a, config)?),
        Command::Poles(a) => poles::run(&merged(a, config)?),
        Command::Mie(a) => mie::run(&merged(a, config)?),
        Command::Billiards(a) => billiards::run(&merged(a, config)?),
        Command::GmresBench(a) => gmres_bench::run(&merged(a, config)?),
        Command::Coercivity(a) => coercivity::run(&merged(a, config)?),
    }
}

pub(crate) fn eta_label(a: f64, b: f64) -> String {
    format!("a={a},b={b}")
}

/// Appends a power-law fit in k for each named column with at least three
/// positive finite values over distinct wavenumbers.
pub(crate) fn append_fits(table: &mut Table, columns: &[&str]) {
    let Some(kc) = table.column("k") else { return };
    for &name in columns {
        let Some(c) = table.column(name) else { continue };
        let pairs: Vec<(f64, f64)> = table
            .rows
            .iter()
            .filter_map(|r| match (&r[kc], &r[c]) {
                (Cell::Float(k), Cell::Float(v)) if v.is_finite() && *v > 0.0 => Some((*k, *v)),
                (Cell::Float(k), Cell::Int(v)) if *v > 0 => Some((*k, *v as f64)),
                _ => None,
            })
            .collect();
        if pairs.len() >= 3 {
            if let Ok(fit) = fit_power_law(&pairs) {
                table.fits.push((name.to_string(), fit));
            }
        }
    }
}

/// Row for a failed computation: the identifying leading cells, empty
/// values and the error message in the last column.
pub(crate) fn failed_row(width: usize, lead: Vec<Cell>, err: &dyn std::fmt::Display) -> Vec<Cell> {
    let mut row = lead;
    row.resize(width - 1, Cell::Empty);
    row.push(Cell::Text(err.to_string()));
    row
}
