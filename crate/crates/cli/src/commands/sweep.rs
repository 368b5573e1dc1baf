use std::sync::Arc;

use clap::Args;
use helmbie::assembly::{assemble_layer_operators, graded_operator_norm, weighted_matrix, BoundaryFunction, SpaceTag};
use helmbie::disk_oracle::{mode_coercivity, mode_norms, mode_truncation};
use helmbie::geom::{boundary_grid, Curve};
use helmbie::linalg::{coercivity_constant, gmres, DEFAULT_MAX_ITERATIONS, DEFAULT_THETA_SAMPLES, DEFAULT_TOL};
use helmbie::operators::{boundary_maps, build_combined_a, decomposition_residuals, mode_residuals, plane_wave_rhs, EtaSpec};
use helmbie::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{append_fits, eta_label, failed_row};
use crate::config::{build_curve, check_wavenumbers, finite, GridRule};
use crate::error::CliError;
use crate::table::{Cell, Table};

pub const COLUMNS: [&str; 15] = [
    "k",
    "eta_model",
    "geometry",
    "N",
    "norm_A",
    "norm_Ainv",
    "cond",
    "alpha_coercivity",
    "gmres_iters_plus",
    "gmres_iters_minus",
    "dtn_ratio",
    "ntd_ratio",
    "resA",
    "resB",
    "error",
];

const QUANTITIES: [&str; 5] = ["norms", "residuals", "maps", "gmres", "coercivity"];

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    /// Curve family: circle, ellipse, kite or smooth_star.
    #[arg(long)]
    pub geometry: Option<String>,
    /// Curve parameters, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Option<Vec<f64>>,
    /// Scale factor applied about the origin.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Wavenumbers, comma separated (empty: header only).
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<f64>>,
    /// η = a·k + i·b: the coefficient a (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub eta_a: Option<f64>,
    /// η = a·k + i·b: the offset b (default 0).
    #[arg(long, allow_hyphen_values = true)]
    pub eta_b: Option<f64>,
    /// Grid rule: auto (max(256, ⌈10k⌉)), modes (centred circle) or an even N.
    #[arg(long)]
    pub n: Option<String>,
    /// Quantities to compute: norms, residuals, maps, gmres, coercivity
    /// (default norms,residuals).
    #[arg(long, value_delimiter = ',')]
    pub quantities: Option<Vec<String>>,
    /// GMRES relative tolerance (default 1e-8).
    #[arg(long)]
    pub tol: Option<f64>,
    /// GMRES iteration cap (default 2000).
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// θ samples for the coercivity constant (default 720).
    #[arg(long)]
    pub theta_samples: Option<usize>,
}

#[derive(Debug, Clone)]
struct Plan {
    curve: Curve,
    k: Vec<f64>,
    a: f64,
    b: f64,
    rule: GridRule,
    quantities: Vec<String>,
    tol: f64,
    max_iterations: usize,
    theta_samples: usize,
}

fn plan(args: &SweepArgs) -> Result<Plan, CliError> {
    let curve = build_curve(args.geometry.as_deref(), args.params.as_deref(), args.scale)?;
    let rule = GridRule::parse(args.n.as_deref())?;
    if rule == GridRule::Modes && curve.origin_circle_radius().is_none() {
        return Err(CliError::Config("the mode path needs a circle centred at the origin".into()));
    }
    let quantities = args.quantities.clone().unwrap_or_else(|| vec!["norms".into(), "residuals".into()]);
    if let Some(q) = quantities.iter().find(|q| !QUANTITIES.contains(&q.as_str())) {
        return Err(CliError::Config(format!("unknown quantity '{q}' (expected one of {QUANTITIES:?})")));
    }
    let tol = args.tol.unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(CliError::Config(format!("tolerance {tol} outside (0, 1e-2]")));
    }
    let theta_samples = args.theta_samples.unwrap_or(DEFAULT_THETA_SAMPLES);
    if theta_samples < 360 {
        return Err(CliError::Config(format!("theta_samples {theta_samples} < 360")));
    }
    Ok(Plan {
        curve,
        k: check_wavenumbers(args.k.as_deref())?,
        a: finite("eta_a", args.eta_a.unwrap_or(1.0))?,
        b: finite("eta_b", args.eta_b.unwrap_or(0.0))?,
        rule,
        quantities,
        tol,
        max_iterations: args.max_iterations.unwrap_or(DEFAULT_MAX_ITERATIONS),
        theta_samples,
    })
}

#[derive(Default)]
struct Values {
    norm_a: Option<f64>,
    norm_ainv: Option<f64>,
    cond: Option<f64>,
    alpha: Option<f64>,
    iters_plus: Option<usize>,
    iters_minus: Option<usize>,
    dtn: Option<f64>,
    ntd: Option<f64>,
    res_a: Option<f64>,
    res_b: Option<f64>,
}

impl Plan {
    fn wants(&self, q: &str) -> bool {
        self.quantities.iter().any(|x| x == q)
    }

    fn modes(&self, k: f64) -> helmbie::Result<Values> {
        let radius = self.curve.origin_circle_radius().expect("checked in plan");
        let eta = C64::new(self.a * k, self.b);
        let n_max = mode_truncation(k);
        let mut v = Values::default();
        if self.wants("norms") || self.wants("maps") {
            let m = mode_norms(k, radius, eta, n_max)?;
            if self.wants("norms") {
                (v.norm_a, v.norm_ainv, v.cond) = (Some(m.norm_a), Some(m.norm_a_inv), Some(m.cond_a));
            }
            if self.wants("maps") {
                (v.dtn, v.ntd) = (Some(m.dtn_ratio), Some(m.ntd_ratio));
            }
        }
        if self.wants("residuals") {
            let r = mode_residuals(k, radius, eta, n_max, None)?;
            (v.res_a, v.res_b) = (Some(r.res_a), Some(r.res_b));
        }
        if self.wants("coercivity") {
            v.alpha = Some(mode_coercivity(k, radius, eta, n_max, self.theta_samples)?);
        }
        Ok(v)
    }

    fn matrix(&self, k: f64, n: usize) -> helmbie::Result<Values> {
        let grid = Arc::new(boundary_grid(&self.curve, n)?);
        let layers = assemble_layer_operators(k, &grid)?;
        let eta = EtaSpec::constant(self.a, self.b);
        let a = build_combined_a(&layers, &eta)?;
        let mut v = Values::default();
        if self.wants("norms") {
            let s = weighted_matrix(&a)
                .singular_values()
                .map_err(|e| helmbie::Error::Decomposition(format!("SVD: {e:?}")))?;
            let (smax, smin) = (s[0], s[s.len() - 1]);
            v.norm_a = Some(smax);
            v.norm_ainv = Some(1.0 / smin);
            v.cond = Some(smax / smin);
        }
        if self.wants("coercivity") {
            v.alpha = Some(coercivity_constant(&a, self.theta_samples)?);
        }
        if self.wants("gmres") {
            let mut iters = [0usize; 2];
            for (slot, sign) in iters.iter_mut().zip([1.0, -1.0]) {
                let e = EtaSpec::constant(sign * self.a, self.b);
                let op = build_combined_a(&layers, &e)?;
                let rhs = BoundaryFunction::new(grid.clone(), plane_wave_rhs(&layers, &e, 0.0)?)?;
                *slot = gmres(&op, &rhs, self.tol, self.max_iterations)?.iterations;
            }
            (v.iters_plus, v.iters_minus) = (Some(iters[0]), Some(iters[1]));
        }
        if self.wants("maps") {
            let maps = boundary_maps(&layers, &eta)?;
            v.dtn = Some(graded_operator_norm(&maps.dtn, SpaceTag::H1k, SpaceTag::L2, k)?);
            v.ntd = Some(graded_operator_norm(&maps.ntd, SpaceTag::L2, SpaceTag::H1k, k)? * k.powf(-1.0 / 3.0));
        }
        if self.wants("residuals") {
            let r = decomposition_residuals(&layers, &eta, None)?;
            (v.res_a, v.res_b) = (Some(r.res_a), Some(r.res_b));
        }
        Ok(v)
    }

    fn row(&self, k: f64) -> Vec<Cell> {
        let n = self.rule.size(k);
        let lead = vec![
            Cell::Float(k),
            Cell::Text(eta_label(self.a, self.b)),
            Cell::Text(self.curve.to_string()),
            n.map_or(Cell::Text("modes".into()), Cell::from),
        ];
        log::info!("sweep k = {k}");
        let result = match n {
            Some(n) => self.matrix(k, n),
            None => self.modes(k),
        };
        match result {
            Ok(v) => {
                let mut row = lead;
                row.extend([
                    Cell::opt_float(v.norm_a),
                    Cell::opt_float(v.norm_ainv),
                    Cell::opt_float(v.cond),
                    Cell::opt_float(v.alpha),
                    v.iters_plus.map_or(Cell::Empty, Cell::from),
                    v.iters_minus.map_or(Cell::Empty, Cell::from),
                    Cell::opt_float(v.dtn),
                    Cell::opt_float(v.ntd),
                    Cell::opt_float(v.res_a),
                    Cell::opt_float(v.res_b),
                    Cell::Empty,
                ]);
                row
            }
            Err(e) => failed_row(COLUMNS.len(), lead, &e),
        }
    }
}

pub fn run(args: &SweepArgs) -> Result<Table, CliError> {
    let plan = plan(args)?;
    let mut table = Table::new("sweep", &COLUMNS);
    table.rows = plan.k.par_iter().map(|&k| plan.row(k)).collect();
    append_fits(&mut table, &["norm_A", "norm_Ainv", "cond", "alpha_coercivity", "gmres_iters_plus", "gmres_iters_minus", "dtn_ratio", "ntd_ratio"]);
    Ok(table)
}
