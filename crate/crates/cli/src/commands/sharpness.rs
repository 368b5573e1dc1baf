use clap::Args;
use helmbie::disk_oracle::sharpness_sweep;
use serde::{Deserialize, Serialize};

use super::{append_fits, failed_row};
use crate::config::{check_wavenumbers, positive};
use crate::error::CliError;
use crate::table::{Cell, Table};

const COLUMNS: [&str; 6] = ["k", "dtn_ratio", "ntd_ratio", "dtn_half", "ntd_half", "error"];

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharpnessArgs {
    /// Wavenumbers, comma separated and strictly ascending.
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<f64>>,
    /// Circle radius (default 1).
    #[arg(long)]
    pub radius: Option<f64>,
}

pub fn run(args: &SharpnessArgs) -> Result<Table, CliError> {
    let k = check_wavenumbers(args.k.as_deref())?;
    if k.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config("wavenumbers must be strictly ascending".into()));
    }
    let radius = positive("radius", args.radius.unwrap_or(1.0))?;
    let mut table = Table::new("sharpness", &COLUMNS);
    table.rows = k
        .iter()
        .map(|&kk| match sharpness_sweep(&[kk], radius) {
            Ok(s) => vec![
                Cell::Float(kk),
                Cell::Float(s.dtn_ratio[0]),
                Cell::Float(s.ntd_ratio[0]),
                Cell::Float(s.dtn_half[0]),
                Cell::Float(s.ntd_half[0]),
                Cell::Empty,
            ],
            Err(e) => failed_row(COLUMNS.len(), vec![Cell::Float(kk)], &e),
        })
        .collect();
    append_fits(&mut table, &["dtn_ratio", "ntd_ratio", "dtn_half", "ntd_half"]);
    Ok(table)
}
