use std::f64::consts::PI;
use std::sync::Arc;

use clap::Args;
use helmbie::assembly::assemble_layer_operators;
use helmbie::disk_oracle::mie_dirichlet;
use helmbie::geom::{boundary_grid, make_curve};
use helmbie::operators::{far_field_pattern, solve_sound_soft, EtaSpec};
use serde::{Deserialize, Serialize};

use crate::config::{finite, positive, GridRule};
use crate::error::CliError;
use crate::table::Table;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MieArgs {
    /// Wavenumber (default 10).
    #[arg(long)]
    pub k: Option<f64>,
    /// Circle radius (default 1).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Incidence angle in radians (default 0).
    #[arg(long, allow_hyphen_values = true)]
    pub direction: Option<f64>,
    /// Number of equispaced far-field angles (default 360).
    #[arg(long)]
    pub angles: Option<usize>,
    /// Also solve the combined-field equation on an N-point grid and compare.
    #[arg(long)]
    pub n: Option<String>,
    /// Coupling η = a·k used by the comparison solve (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub eta_a: Option<f64>,
}

pub fn run(args: &MieArgs) -> Result<Table, CliError> {
    let k = positive("k", args.k.unwrap_or(10.0))?;
    let radius = positive("radius", args.radius.unwrap_or(1.0))?;
    let direction = finite("direction", args.direction.unwrap_or(0.0))?;
    let angles = args.angles.unwrap_or(360);
    if !(1..=100_000).contains(&angles) {
        return Err(CliError::Config(format!("angle count {angles} outside [1, 100000]")));
    }
    let n = match args.n.as_deref() {
        None => None,
        Some(s) => match GridRule::parse(Some(s))? {
            GridRule::Modes => return Err(CliError::Config("the comparison solve needs a grid size".into())),
            rule => rule.size(k),
        },
    };
    let eta_a = finite("eta_a", args.eta_a.unwrap_or(1.0))?;
    let mie = mie_dirichlet(k, radius, direction)?;
    let thetas: Vec<f64> = (0..angles).map(|i| 2.0 * PI * i as f64 / angles as f64).collect();
    let exact = thetas.iter().map(|&t| mie.far_field(t)).collect::<Result<Vec<_>, _>>()?;

    let mut table;
    if let Some(n) = n {
        let grid = Arc::new(boundary_grid(&make_curve("circle", &[radius])?, n)?);
        let layers = assemble_layer_operators(k, &grid)?;
        let neumann = solve_sound_soft(&layers, &EtaSpec::constant(eta_a, 0.0), direction)?;
        table = Table::new("mie", &["angle", "far_re", "far_im", "cfie_re", "cfie_im", "abs_error"]);
        let (mut err, mut scale) = (0.0f64, 0.0f64);
        for (&t, e) in thetas.iter().zip(&exact) {
            let c = far_field_pattern(&grid, k, &neumann, t)?;
            let d = (c - e).norm();
            err = err.max(d);
            scale = scale.max(e.norm());
            table.push(vec![t.into(), e.re.into(), e.im.into(), c.re.into(), c.im.into(), d.into()]);
        }
        table.summary("N", n);
        table.summary("max_relative_error", err / scale);
    } else {
        table = Table::new("mie", &["angle", "far_re", "far_im"]);
        for (&t, e) in thetas.iter().zip(&exact) {
            table.push(vec![t.into(), e.re.into(), e.im.into()]);
        }
    }
    table.summary("k", k);
    table.summary("radius", radius);
    table.summary("n_max", mie.n_max);
    table.summary("series_tail", mie.tail);
    table.summary("cross_section", mie.cross_section());
    table.summary("optical_theorem_cross_section", mie.optical_theorem_cross_section()?);
    Ok(table)
}
