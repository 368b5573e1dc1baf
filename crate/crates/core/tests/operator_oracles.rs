use std::sync::Arc;

use helmbie::assembly::{assemble_layer_operators, l2_operator_norm};
use helmbie::geom::{boundary_grid, make_curve};
use helmbie::operators::{
    build_combined_btilde, calderon_projectors, decomposition_residuals, resolved_band_defects, EtaSpec, Regularizer,
    RegularizerKind,
};

fn kite_layers(n: usize) -> helmbie::assembly::LayerOperators {
    let g = boundary_grid(&make_curve("kite", &[]).unwrap(), n).unwrap();
    assemble_layer_operators(5.0, &g).unwrap()
}

#[test]
fn kite_plain_product_defects_decay_like_inverse_grid_size() {
    let eta = EtaSpec::constant(1.0, 0.0);
    let coarse = decomposition_residuals(&kite_layers(256), &eta, None).unwrap();
    let fine = decomposition_residuals(&kite_layers(512), &eta, None).unwrap();
    assert!(fine.res_btilde.is_none());
    let ratio = coarse.res_a / fine.res_a;
    assert!((1.6..2.5).contains(&ratio), "{coarse:?} {fine:?}");
    assert!(fine.res_a < coarse.res_a && fine.res_b < coarse.res_b);
}

#[test]
fn kite_resolved_band_defects_are_spectrally_small() {
    // Operators on 1024 nodes measured on 512-point band-limited data.
    let fine = kite_layers(1024);
    let d = resolved_band_defects(&fine, &EtaSpec::constant(1.0, 0.0)).unwrap();
    assert!(d.projector < 1e-6, "{d:?}");
    assert!(d.res_a < 1e-6 && d.res_b < 1e-6, "{d:?}");
}

#[test]
fn kite_projectors_complementary_and_resolved_modes_idempotent() {
    let l = kite_layers(256);
    let p = calderon_projectors(&l);
    let cross = p.plus.compose(&p.minus);
    // Low modes of Π₊Π₋ vanish to spectral accuracy.
    let n = 256;
    for m in [0i64, 3, 17, 40] {
        let f: Vec<_> = l.s.grid.nodes.iter().map(|&t| helmbie::C64::from_polar(1.0, m as f64 * t)).collect();
        let (a, b) = cross.apply(&f, &f).unwrap();
        let worst = a.iter().chain(&b).map(|z| z.norm()).fold(0.0, f64::max);
        assert!(worst < 1e-9, "mode {m}: {worst}");
    }
    assert_eq!(p.plus.n(), n);
}

#[test]
fn btilde_with_sik_bounded_under_refinement() {
    let k = 5.0;
    let mut norms = Vec::new();
    for n in [256, 512] {
        let g = Arc::new(boundary_grid(&make_curve("kite", &[]).unwrap(), n).unwrap());
        let l = assemble_layer_operators(k, &g).unwrap();
        let r = Regularizer::sik(k, &l.s.grid).unwrap();
        assert_eq!(r.kind, RegularizerKind::Sik);
        let bt = build_combined_btilde(&l, &EtaSpec::constant(1.0, 0.0), &r).unwrap();
        norms.push(l2_operator_norm(&bt).unwrap());
    }
    assert!((norms[0] - norms[1]).abs() < 1e-6, "{norms:?}");
}

#[test]
fn circle_btilde_mode_residual_with_laplace_regularizer() {
    let g = boundary_grid(&make_curve("circle", &[0.8]).unwrap(), 128).unwrap();
    let l = assemble_layer_operators(6.0, &g).unwrap();
    let r = Regularizer::s0(&l.s.grid).unwrap();
    let res = decomposition_residuals(&l, &EtaSpec::constant(1.0, 0.0), Some(&r)).unwrap();
    assert!(res.res_btilde.unwrap() < 1e-8, "{res:?}");
    assert!(res.res_a < 1e-8 && res.res_b < 1e-8, "{res:?}");
}
