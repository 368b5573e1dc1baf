use std::sync::Arc;

use clap::Args;
use helmbie::assembly::{assemble_layer_operators, BoundaryFunction};
use helmbie::geom::{boundary_grid, Curve};
use helmbie::linalg::{gmres, solve_dense, GmresReport, DEFAULT_MAX_ITERATIONS, DEFAULT_TOL};
use helmbie::operators::{build_combined_a, plane_wave_rhs, EtaSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{append_fits, eta_label, failed_row};
use crate::config::{build_curve, check_wavenumbers, finite, GridRule};
use crate::error::CliError;
use crate::table::{Cell, Table};

const COLUMNS: [&str; 12] = [
    "k",
    "eta_model",
    "geometry",
    "N",
    "gmres_iters_plus",
    "gmres_iters_minus",
    "residual_plus",
    "residual_minus",
    "converged_plus",
    "converged_minus",
    "direct_agreement",
    "error",
];

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GmresBenchArgs {
    /// Curve family: circle, ellipse, kite or smooth_star (default kite).
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
    /// Grid rule: auto or an even N.
    #[arg(long)]
    pub n: Option<String>,
    /// Relative tolerance (default 1e-8).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap (default 2000).
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Plane-wave incidence angle (default 0).
    #[arg(long, allow_hyphen_values = true)]
    pub direction: Option<f64>,
}

struct Plan {
    curve: Curve,
    a: f64,
    b: f64,
    rule: GridRule,
    tol: f64,
    max_iterations: usize,
    direction: f64,
}

impl Plan {
    fn solve(&self, k: f64, n: usize) -> helmbie::Result<([GmresReport; 2], f64)> {
        let grid = Arc::new(boundary_grid(&self.curve, n)?);
        let layers = assemble_layer_operators(k, &grid)?;
        let run = |sign: f64| -> helmbie::Result<(GmresReport, Vec<helmbie::C64>)> {
            let eta = EtaSpec::constant(sign * self.a, self.b);
            let a = build_combined_a(&layers, &eta)?;
            let rhs = BoundaryFunction::new(grid.clone(), plane_wave_rhs(&layers, &eta, self.direction)?)?;
            let report = gmres(&a, &rhs, self.tol, self.max_iterations)?;
            let direct = solve_dense(&a, &rhs)?.values;
            Ok((report, direct))
        };
        let (plus, dp) = run(1.0)?;
        let (minus, _) = run(-1.0)?;
        // Both η give the same Neumann trace; report how closely GMRES matches
        // the direct solve for η = +a·k.
        let num: f64 = plus.solution.iter().zip(&dp).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        let den: f64 = dp.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
        Ok(([plus, minus], num / den))
    }

    fn row(&self, k: f64) -> Vec<Cell> {
        let n = self.rule.size(k).expect("mode path rejected in run");
        let lead = vec![Cell::Float(k), Cell::Text(eta_label(self.a, self.b)), Cell::Text(self.curve.to_string()), n.into()];
        match self.solve(k, n) {
            Ok(([p, m], agree)) => {
                let mut row = lead;
                row.extend([
                    p.iterations.into(),
                    m.iterations.into(),
                    p.final_relative_residual.into(),
                    m.final_relative_residual.into(),
                    p.converged.into(),
                    m.converged.into(),
                    agree.into(),
                    Cell::Empty,
                ]);
                row
            }
            Err(e) => failed_row(COLUMNS.len(), lead, &e),
        }
    }
}

pub fn run(args: &GmresBenchArgs) -> Result<Table, CliError> {
    let rule = GridRule::parse(args.n.as_deref())?;
    if rule == GridRule::Modes {
        return Err(CliError::Config("gmres-bench needs a matrix grid (auto or an even N)".into()));
    }
    let tol = args.tol.unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(CliError::Config(format!("tolerance {tol} outside (0, 1e-2]")));
    }
    let plan = Plan {
        curve: build_curve(Some(args.geometry.as_deref().unwrap_or("kite")), args.params.as_deref(), args.scale)?,
        a: finite("eta_a", args.eta_a.unwrap_or(1.0))?.abs(),
        b: finite("eta_b", args.eta_b.unwrap_or(0.0))?,
        rule,
        tol,
        max_iterations: args.max_iterations.unwrap_or(DEFAULT_MAX_ITERATIONS),
        direction: finite("direction", args.direction.unwrap_or(0.0))?,
    };
    let k = check_wavenumbers(args.k.as_deref())?;
    let mut table = Table::new("gmres-bench", &COLUMNS);
    table.rows = k.par_iter().map(|&k| plan.row(k)).collect();
    append_fits(&mut table, &["gmres_iters_plus", "gmres_iters_minus"]);
    Ok(table)
}
