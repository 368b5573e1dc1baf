use clap::Args;
use helmbie::disk_oracle::{impedance_pole_scan, PoleScanConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::table::{Cell, Table};

const COLUMNS: [&str; 5] = ["n", "k_re", "k_im", "refined", "residual"];

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolesArgs {
    /// Impedance coefficient a in η = a·k + i·b (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Impedance offset b (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Real window lo,hi (default 1,40).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub re_window: Option<Vec<f64>>,
    /// Imaginary window lo,hi (default -2,0.5).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub im_window: Option<Vec<f64>>,
    /// Grid points per unit length (default 20).
    #[arg(long)]
    pub grid_density: Option<f64>,
    /// Highest angular mode (default 60).
    #[arg(long)]
    pub n_max: Option<usize>,
}

fn window(name: &str, v: Option<&[f64]>, default: (f64, f64)) -> Result<(f64, f64), CliError> {
    match v {
        None => Ok(default),
        Some([lo, hi]) => Ok((*lo, *hi)),
        Some(other) => Err(CliError::Config(format!("{name} needs two values, got {}", other.len()))),
    }
}

pub fn run(args: &PolesArgs) -> Result<Table, CliError> {
    let d = PoleScanConfig::default();
    let cfg = PoleScanConfig {
        a: args.a.unwrap_or(d.a),
        b: args.b.unwrap_or(d.b),
        re_window: window("re_window", args.re_window.as_deref(), d.re_window)?,
        im_window: window("im_window", args.im_window.as_deref(), d.im_window)?,
        grid_density: args.grid_density.unwrap_or(d.grid_density),
        n_max: args.n_max.unwrap_or(d.n_max),
    };
    let scan = impedance_pole_scan(&cfg).map_err(|e| match e {
        helmbie::Error::InvalidParameter(m) => CliError::Config(m),
        other => CliError::Numerical(other),
    })?;
    let mut table = Table::new("poles", &COLUMNS);
    for p in scan.poles.iter().chain(&scan.unrefined) {
        table.push(vec![Cell::from(p.n), p.k_re.into(), p.k_im.into(), p.refined.into(), p.residual.into()]);
    }
    table.summary("a", cfg.a);
    table.summary("b", cfg.b);
    table.summary("pole_count", scan.poles.len());
    table.summary("unrefined_count", scan.unrefined.len());
    table.summary("upper_half_count", scan.upper_half_count);
    table.summary("eps_hat", Cell::opt_float(scan.eps_hat));
    table.summary("origin_degenerate", scan.origin_degenerate);
    Ok(table)
}
