use std::sync::Arc;

use clap::Args;
use helmbie::assembly::{assemble_layer_operators, weighted_matrix};
use helmbie::disk_oracle::{mode_coercivity, mode_norms, mode_truncation};
use helmbie::geom::{boundary_grid, Curve};
use helmbie::linalg::{coercivity_constant, DEFAULT_THETA_SAMPLES};
use helmbie::operators::{build_combined_a, EtaSpec};
use helmbie::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{append_fits, eta_label, failed_row};
use crate::config::{build_curve, check_wavenumbers, finite, GridRule};
use crate::error::CliError;
use crate::table::{Cell, Table};

const COLUMNS: [&str; 9] = ["k", "eta_model", "geometry", "N", "alpha_plus", "alpha_minus", "sigma_min", "norm_A", "error"];

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoercivityArgs {
    /// Curve family: circle, ellipse, kite or smooth_star (default circle).
    #[arg(long)]
    pub geometry: Option<String>,
    /// Curve parameters, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Option<Vec<f64>>,
    /// Scale factor applied about the origin.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Wavenumbers, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<f64>>,
    /// |a| in η = ±a·k + i·b (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub eta_a: Option<f64>,
    /// b in η = ±a·k + i·b (default 0).
    #[arg(long, allow_hyphen_values = true)]
    pub eta_b: Option<f64>,
    /// Grid rule: auto, modes (centred circle) or an even N.
    #[arg(long)]
    pub n: Option<String>,
    /// θ samples for the numerical-range support function (default 720).
    #[arg(long)]
    pub theta_samples: Option<usize>,
}

struct Plan {
    curve: Curve,
    a: f64,
    b: f64,
    rule: GridRule,
    theta_samples: usize,
}

impl Plan {
    /// (α for +a, α for −a, σ_min, ‖A'‖), both norms for η = +a·k + i·b.
    fn values(&self, k: f64) -> helmbie::Result<[f64; 4]> {
        match self.rule.size(k) {
            None => {
                let radius = self.curve.origin_circle_radius().expect("checked in run");
                let n_max = mode_truncation(k);
                let eta = |s: f64| C64::new(s * self.a * k, self.b);
                let m = mode_norms(k, radius, eta(1.0), n_max)?;
                Ok([
                    mode_coercivity(k, radius, eta(1.0), n_max, self.theta_samples)?,
                    mode_coercivity(k, radius, eta(-1.0), n_max, self.theta_samples)?,
                    1.0 / m.norm_a_inv,
                    m.norm_a,
                ])
            }
            Some(n) => {
                let grid = Arc::new(boundary_grid(&self.curve, n)?);
                let layers = assemble_layer_operators(k, &grid)?;
                let plus = build_combined_a(&layers, &EtaSpec::constant(self.a, self.b))?;
                let minus = build_combined_a(&layers, &EtaSpec::constant(-self.a, self.b))?;
                let s = weighted_matrix(&plus)
                    .singular_values()
                    .map_err(|e| helmbie::Error::Decomposition(format!("SVD: {e:?}")))?;
                Ok([
                    coercivity_constant(&plus, self.theta_samples)?,
                    coercivity_constant(&minus, self.theta_samples)?,
                    s[s.len() - 1],
                    s[0],
                ])
            }
        }
    }

    fn row(&self, k: f64) -> Vec<Cell> {
        let n = self.rule.size(k).map_or(Cell::Text("modes".into()), Cell::from);
        let lead = vec![Cell::Float(k), Cell::Text(eta_label(self.a, self.b)), Cell::Text(self.curve.to_string()), n];
        match self.values(k) {
            Ok(v) => {
                let mut row = lead;
                row.extend(v.iter().map(|&x| Cell::Float(x)));
                row.push(Cell::Empty);
                row
            }
            Err(e) => failed_row(COLUMNS.len(), lead, &e),
        }
    }
}

pub fn run(args: &CoercivityArgs) -> Result<Table, CliError> {
    let curve = build_curve(args.geometry.as_deref(), args.params.as_deref(), args.scale)?;
    let rule = GridRule::parse(args.n.as_deref())?;
    if rule == GridRule::Modes && curve.origin_circle_radius().is_none() {
        return Err(CliError::Config("the mode path needs a circle centred at the origin".into()));
    }
    let theta_samples = args.theta_samples.unwrap_or(DEFAULT_THETA_SAMPLES);
    if theta_samples < 360 {
        return Err(CliError::Config(format!("theta_samples {theta_samples} < 360")));
    }
    let plan = Plan {
        curve,
        a: finite("eta_a", args.eta_a.unwrap_or(1.0))?.abs(),
        b: finite("eta_b", args.eta_b.unwrap_or(0.0))?,
        rule,
        theta_samples,
    };
    let k = check_wavenumbers(args.k.as_deref())?;
    let mut table = Table::new("coercivity", &COLUMNS);
    table.rows = k.par_iter().map(|&k| plan.row(k)).collect();
    append_fits(&mut table, &["alpha_plus", "sigma_min", "norm_A"]);
    Ok(table)
}
