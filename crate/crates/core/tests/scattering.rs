use std::f64::consts::PI;
use std::sync::Arc;

use helmbie::assembly::{assemble_layer_operators, BoundaryFunction};
use helmbie::disk_oracle::mie_dirichlet;
use helmbie::geom::{boundary_grid, make_curve};
use helmbie::linalg::{gmres, DEFAULT_MAX_ITERATIONS};
use helmbie::operators::{build_combined_a, build_combined_b, far_field_pattern, plane_wave_rhs, solve_sound_soft, EtaSpec};
use helmbie::C64;

#[test]
fn cfie_far_field_matches_mie_series() {
    let (k, dir) = (10.0, 0.3);
    let grid = Arc::new(boundary_grid(&make_curve("circle", &[1.0]).unwrap(), 512).unwrap());
    let layers = assemble_layer_operators(k, &grid).unwrap();
    let neumann = solve_sound_soft(&layers, &EtaSpec::constant(1.0, 0.0), dir).unwrap();
    let mie = mie_dirichlet(k, 1.0, dir).unwrap();
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for i in 0..360 {
        let th = 2.0 * PI * i as f64 / 360.0;
        let exact = mie.far_field(th).unwrap();
        err = err.max((far_field_pattern(&grid, k, &neumann, th).unwrap() - exact).norm());
        scale = scale.max(exact.norm());
    }
    assert!(err / scale < 1e-6, "relative far-field error {:.3e}", err / scale);
}

#[test]
fn mie_cauchy_data_satisfy_combined_equation() {
    // Exterior Cauchy data of the scattered field: γu^s = −uⁱ, ∂u^s = ∂u − ∂uⁱ.
    let (k, dir) = (10.0, 0.0);
    let grid = Arc::new(boundary_grid(&make_curve("circle", &[1.0]).unwrap(), 512).unwrap());
    let layers = assemble_layer_operators(k, &grid).unwrap();
    let eta = EtaSpec::constant(1.0, 0.0);
    let mie = mie_dirichlet(k, 1.0, dir).unwrap();
    let total = mie.boundary_neumann_data(&grid.nodes).unwrap();
    let (dir_s, neu_s): (Vec<C64>, Vec<C64>) = (0..grid.n)
        .map(|j| {
            let (x, n) = (grid.points[j], grid.normals[j]);
            let ui = C64::from_polar(1.0, k * x[0]);
            (-ui, total[j] - ui * C64::new(0.0, k * n[0]))
        })
        .unzip();
    let a = build_combined_a(&layers, &eta).unwrap();
    let b = build_combined_b(&layers, &eta).unwrap();
    let an = a.apply(&BoundaryFunction::new(grid.clone(), neu_s).unwrap()).unwrap();
    let bd = b.apply(&BoundaryFunction::new(grid.clone(), dir_s).unwrap()).unwrap();
    let res = an.values.iter().zip(&bd.values).map(|(p, q)| (p - q).norm_sqr()).zip(&grid.weights).map(|(e, w)| e * w).sum::<f64>().sqrt();
    assert!(res < 1e-7, "‖A'∂u − Bγu‖ = {res:.3e}");
}

#[test]
fn gmres_iterations_depend_on_sign_of_eta() {
    let k = 40.0;
    let grid = Arc::new(boundary_grid(&make_curve("kite", &[]).unwrap(), 1024).unwrap());
    let layers = assemble_layer_operators(k, &grid).unwrap();
    let mut iters = Vec::new();
    for a_sign in [1.0, -1.0] {
        let eta = EtaSpec::constant(a_sign, 0.0);
        let a = build_combined_a(&layers, &eta).unwrap();
        let rhs = BoundaryFunction::new(grid.clone(), plane_wave_rhs(&layers, &eta, 0.0).unwrap()).unwrap();
        let r = gmres(&a, &rhs, 1e-8, DEFAULT_MAX_ITERATIONS).unwrap();
        assert!(r.converged);
        iters.push(r.iterations);
    }
    assert!(iters[0] < iters[1], "η=+k: {}, η=−k: {}", iters[0], iters[1]);
}
