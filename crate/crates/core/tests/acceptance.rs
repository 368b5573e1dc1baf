//! Acceptance suite: one PASS/FAIL line per criterion with the measured
//! values.  Exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;
use std::time::Instant;

use faer::Mat;
use helmbie::assembly::{assemble_layer_operators, BoundaryFunction, DiscreteOperator};
use helmbie::billiards::{escape_statistics, reflect, trace_ray_path, Classification, Obstacle, Scene, Termination};
use helmbie::disk_oracle::{
    ball_sharpness_ratio, impedance_pole_scan, mie_dirichlet, mode_path, mode_table, sharpness_sweep, PoleScanConfig,
    RegularizerSymbol,
};
use helmbie::geom::{boundary_grid, make_curve, BoundaryGrid};
use helmbie::linalg::{fit_power_law, gmres, gmres_matrix, DEFAULT_MAX_ITERATIONS};
use helmbie::operators::{
    build_combined_a, build_combined_b, calderon_projectors, BlockOperator, decomposition_residuals, far_field_pattern, mode_residuals,
    plane_wave_rhs, resolved_band_defects, solve_sound_soft, EtaSpec,
};
use helmbie::specfun::bessel;
use helmbie::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;

struct Suite {
    failures: usize,
}

impl Suite {
    fn check(&mut self, id: u32, name: &str, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let (pass, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            self.failures += 1;
        }
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {verdict} [{name}] {detail} ({:.1} s)", start.elapsed().as_secs_f64());
    }
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn grid(name: &str, params: &[f64], n: usize) -> Result<Arc<BoundaryGrid>, String> {
    Ok(Arc::new(boundary_grid(&make_curve(name, params).map_err(e)?, n).map_err(e)?))
}

fn k_ladder() -> Vec<f64> {
    (0..7).map(|j| 20.0 * 2f64.powi(j)).collect()
}

fn fit(k: &[f64], v: impl Iterator<Item = f64>) -> Result<f64, String> {
    let pairs: Vec<(f64, f64)> = k.iter().copied().zip(v).collect();
    Ok(fit_power_law(&pairs).map_err(e)?.exponent)
}

fn mode_error(op: &DiscreteOperator, g: &Arc<BoundaryGrid>, n: i64, symbol: C64) -> Result<f64, String> {
    let f = BoundaryFunction::from_fn(g.clone(), |t, _| C64::from_polar(1.0, n as f64 * t));
    let out = op.apply(&f).map_err(e)?;
    Ok(out.values.iter().zip(&f.values).map(|(a, b)| (a - symbol * b).norm()).fold(0.0, f64::max))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let k = 5.0;
    let g = grid("circle", &[1.0], 256)?;
    let layers = assemble_layer_operators(k, &g).map_err(e)?;
    let eta = EtaSpec::constant(1.0, 0.0);
    let a = build_combined_a(&layers, &eta).map_err(e)?;
    let b = build_combined_b(&layers, &eta).map_err(e)?;
    let t = mode_table(k, 1.0, C64::new(k, 0.0), 10).map_err(e)?;
    let mut worst = 0.0f64;
    for n in -10i64..=10 {
        let [s, d, dadj, h, ap, bb, _, _] = t.at(n);
        for (op, sym) in [(&layers.s, s), (&layers.d, d), (&layers.dadj, dadj), (&layers.h, h), (&a, ap), (&b, bb)] {
            worst = worst.max(mode_error(op, &g, n, sym)?);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((worst < 1e-9 && secs < 10.0, format!("max node-wise error {worst:.2e} over S,D,D',H,A',B, |n|≤10 (limit 1e-9); runtime {secs:.2} s (limit 10 s)")))
}

fn projector_defect(name: &str, params: &[f64], n: usize, k: f64) -> Result<f64, String> {
    let g = grid(name, params, n)?;
    let p = calderon_projectors(&assemble_layer_operators(k, &g).map_err(e)?);
    p.minus.compose(&p.minus).distance(&p.minus).map_err(e)
}

fn criterion_2() -> Outcome {
    let circle = projector_defect("circle", &[1.0], 256, 5.0)?;
    let kite = projector_defect("kite", &[], 512, 5.0)?;
    let fine = assemble_layer_operators(5.0, &*grid("kite", &[], 1024)?).map_err(e)?;
    let resolved = resolved_band_defects(&fine, &EtaSpec::constant(1.0, 0.0)).map_err(e)?;
    Ok((
        circle < 1e-8 && kite < 1e-6,
        format!(
            "‖Π₋²−Π₋‖: circle N=256 {circle:.2e} (limit 1e-8), kite N=512 {kite:.2e} (limit 1e-6); \
             kite band |m|<N/2 with products on 2N nodes: {:.2e}",
            resolved.projector
        ),
    ))
}

fn criterion_3() -> Outcome {
    let k = 10.0;
    let mut mode = 0.0f64;
    for eta in [C64::new(k, 0.0), C64::new(-k, 0.0), C64::new(k, 1.0)] {
        let r = mode_residuals(k, 1.0, eta, 40, None).map_err(e)?;
        mode = mode.max(r.res_a).max(r.res_b);
    }
    let bt = mode_residuals(k, 0.8, C64::new(k, 0.0), 40, Some((RegularizerSymbol::S0, 0.0))).map_err(e)?;
    let btilde = bt.res_btilde.ok_or("no B̃ residual")?;
    let eta = EtaSpec::constant(1.0, 0.0);
    let kite = assemble_layer_operators(5.0, &*grid("kite", &[], 512)?).map_err(e)?;
    let m = decomposition_residuals(&kite, &eta, None).map_err(e)?;
    let fine = assemble_layer_operators(5.0, &*grid("kite", &[], 1024)?).map_err(e)?;
    let resolved = resolved_band_defects(&fine, &eta).map_err(e)?;
    Ok((
        mode < 1e-10 && btilde < 1e-8 && m.res_a < 1e-5 && m.res_b < 1e-5,
        format!(
            "mode-level A',B residual {mode:.2e} (limit 1e-10); mode-level B̃ (S0, radius 0.8) {btilde:.2e} (limit 1e-8); \
             kite N=512 resA {:.2e}, resB {:.2e} (limit 1e-5); band |m|<N/2 with products on 2N nodes: resA {:.2e}, resB {:.2e}",
            m.res_a, m.res_b, resolved.res_a, resolved.res_b
        ),
    ))
}

fn criteria_4_to_8(suite: &mut Suite) {
    let k = k_ladder();
    let start = Instant::now();
    let path = mode_path(&k, 1.0, 0.0);
    let path_secs = start.elapsed().as_secs_f64();
    let path = match path {
        Ok(p) => p,
        Err(err) => {
            for id in 4..=8 {
                suite.check(id, "mode path", || Err(err.to_string()));
            }
            return;
        }
    };
    suite.check(4, "‖A'⁻¹‖ bounded", || {
        let p = fit(&k, path.iter().map(|m| m.norm_a_inv))?;
        let lo = path.iter().map(|m| m.norm_a_inv).fold(f64::INFINITY, f64::min);
        let hi = path.iter().map(|m| m.norm_a_inv).fold(0.0, f64::max);
        Ok((p.abs() <= 0.1, format!("exponent {p:.4} (limit |p|≤0.1); values in [{lo:.6}, {hi:.6}], floor {lo:.6} (claimed ≥ 2, recorded only)")))
    });
    suite.check(5, "cond(A') ~ k^{1/3}", || {
        let p = fit(&k, path.iter().map(|m| m.cond_a))?;
        Ok(((0.18..=0.48).contains(&p) && path_secs < 60.0, format!("exponent {p:.4} (bracket [0.18, 0.48]); mode path {path_secs:.2} s (limit 60 s)")))
    });
    suite.check(6, "‖S‖, ‖D‖ exponents", || {
        let ps = fit(&k, path.iter().map(|m| m.norm_s))?;
        let pd = fit(&k, path.iter().map(|m| m.norm_d))?;
        let (dlo, dhi) = path.iter().fold((f64::INFINITY, 0.0f64), |(a, b), m| (a.min(m.norm_d), b.max(m.norm_d)));
        Ok((
            (-0.77..=-0.57).contains(&ps) && (0.0..=0.33).contains(&pd),
            format!("‖S‖ exponent {ps:.4} (bracket [−0.77, −0.57]); ‖D‖ exponent {pd:.5} (bracket [0, 0.33]), ‖D‖ values in [{dlo:.4}, {dhi:.4}]"),
        ))
    });
    suite.check(7, "DtN/NtD sharpness", || {
        let s = sharpness_sweep(&k, 1.0).map_err(e)?;
        let pd = fit(&k, s.dtn_ratio.iter().copied())?;
        let pn = fit(&k, s.ntd_ratio.iter().copied())?;
        let (lo, hi) = s.dtn_ratio.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        let (nlo, nhi) = s.ntd_ratio.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        Ok((
            pd.abs() <= 0.05 && pn.abs() <= 0.1 && lo >= 0.5 && hi <= 2.0,
            format!("dtn exponent {pd:.5} (|p|≤0.05), values in [{lo:.6}, {hi:.6}] ⊂ [0.5, 2]; ntd·k^(−1/3) exponent {pn:.4} (|p|≤0.1), values in [{nlo:.4}, {nhi:.4}]"),
        ))
    });
    suite.check(8, "ItD L²→H¹_k bounded", || {
        let p = fit(&k, path.iter().map(|m| m.itd_h1))?;
        let hi = path.iter().map(|m| m.itd_h1).fold(0.0, f64::max);
        Ok((p.abs() <= 0.1, format!("exponent {p:.4} (limit |p|≤0.1); max value {hi:.4}")))
    });
}

fn criterion_9() -> Outcome {
    let ks = [20.0, 40.0, 80.0, 160.0, 320.0, 640.0];
    let mut min_ratio = f64::INFINITY;
    for d in [2, 3] {
        for &k in &ks {
            min_ratio = min_ratio.min(ball_sharpness_ratio(k, 2, d).map_err(e)?);
        }
    }
    let r640 = ball_sharpness_ratio(640.0, 2, 2).map_err(e)?;
    Ok((
        min_ratio >= 0.4 && (r640 - FRAC_1_SQRT_2).abs() <= 0.05,
        format!("min ratio over d∈{{2,3}}, k∈[20,640]: {min_ratio:.4} (limit ≥0.4); d=2, k=640: {r640:.5} vs 1/√2"),
    ))
}

fn criterion_10() -> Outcome {
    let scan = impedance_pole_scan(&PoleScanConfig::default()).map_err(e)?;
    let eps = scan.eps_hat.unwrap_or(f64::NAN);
    let degenerate = impedance_pole_scan(&PoleScanConfig { b: 0.0, ..PoleScanConfig::default() }).map_err(e)?;
    Ok((
        scan.upper_half_count == 0 && eps > 0.0 && !scan.origin_degenerate && degenerate.origin_degenerate,
        format!(
            "a=1,b=1: {} poles, {} with Im k ≥ 0, ε̂ = {eps:.4}; b=0: origin degenerate = {}",
            scan.poles.len(),
            scan.upper_half_count,
            degenerate.origin_degenerate
        ),
    ))
}

fn criterion_11() -> Outcome {
    let k = 40.0;
    let g = grid("kite", &[], 1024)?;
    let layers = assemble_layer_operators(k, &g).map_err(e)?;
    let mut iters = Vec::new();
    for a in [1.0, -1.0] {
        let eta = EtaSpec::constant(a, 0.0);
        let op = build_combined_a(&layers, &eta).map_err(e)?;
        let rhs = BoundaryFunction::new(g.clone(), plane_wave_rhs(&layers, &eta, 0.0).map_err(e)?).map_err(e)?;
        let r = gmres(&op, &rhs, 1e-8, DEFAULT_MAX_ITERATIONS).map_err(e)?;
        if !r.converged {
            return Ok((false, format!("η={a}k did not converge in {} iterations", r.iterations)));
        }
        iters.push(r.iterations);
    }
    Ok((iters[0] < iters[1], format!("kite k=40 N=1024: iterations η=+k {} vs η=−k {}", iters[0], iters[1])))
}

fn criterion_12() -> Outcome {
    let (k, dir) = (10.0, 0.0);
    let g = grid("circle", &[1.0], 512)?;
    let layers = assemble_layer_operators(k, &g).map_err(e)?;
    let neumann = solve_sound_soft(&layers, &EtaSpec::constant(1.0, 0.0), dir).map_err(e)?;
    let mie = mie_dirichlet(k, 1.0, dir).map_err(e)?;
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for i in 0..360 {
        let th = 2.0 * PI * i as f64 / 360.0;
        let exact = mie.far_field(th).map_err(e)?;
        err = err.max((far_field_pattern(&g, k, &neumann, th).map_err(e)? - exact).norm());
        scale = scale.max(exact.norm());
    }
    Ok((err / scale < 1e-6, format!("max far-field error / max |u∞| = {:.2e} at 360 angles (limit 1e-6)", err / scale)))
}

fn criterion_13() -> Outcome {
    let start = Instant::now();
    let disc = |x: f64| -> Result<Obstacle, String> { Ok(Obstacle::Curve(make_curve("circle", &[1.0]).map_err(e)?.translated([x, 0.0]))) };
    let two = Scene::new(vec![disc(2.0)?, disc(-2.0)?], 5.0).map_err(e)?;
    let kite = Scene::new(vec![Obstacle::Curve(make_curve("kite", &[]).map_err(e)?)], 5.0).map_err(e)?;
    let a = escape_statistics(&two, 10_000, 200.0, 0).map_err(e)?;
    let b = escape_statistics(&kite, 10_000, 200.0, 0).map_err(e)?;
    let secs = start.elapsed().as_secs_f64();
    let kite_max = b.max_escape_time.unwrap_or(f64::INFINITY);
    Ok((
        a.classification == Classification::TrappingEmpirical
            && b.classification == Classification::NontrappingEmpirical
            && kite_max.is_finite()
            && secs < 30.0,
        format!(
            "two discs: {:?} (fraction escaped {:.4}, {} period-2 witness); kite: {:?} (fraction {:.4}, max escape time {kite_max:.3}); {secs:.1} s (limit 30 s)",
            a.classification,
            a.fraction_escaped,
            a.witnesses.len(),
            b.classification,
            b.fraction_escaped
        ),
    ))
}

fn criterion_14() -> Outcome {
    let mut notes = Vec::new();
    // Wronskian at orders 0..50 and log-spaced arguments in [0.1, 1000].
    let mut wr = 0.0f64;
    for nu in 0..=50 {
        for j in 0..=40 {
            let x = 0.1 * 10f64.powf(4.0 * j as f64 / 40.0);
            let b = bessel(nu as f64, C64::new(x, 0.0)).map_err(e)?;
            let exact = 2.0 / (PI * x);
            wr = wr.max((b.wronskian() - exact).norm() / exact);
        }
    }
    notes.push(format!("Wronskian rel. error {wr:.1e}"));
    // GMRES residual histories on random shifted matrices.
    let mut monotone = true;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 40;
        let a = Mat::from_fn(n, n, |i, j| {
            let z = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) / (n as f64).sqrt();
            if i == j { z + seed as f64 * 0.1 } else { z }
        });
        let b = vec![C64::new(1.0, 0.0); n];
        let r = gmres_matrix(&a, &b, 1e-10, n).map_err(e)?;
        monotone &= r.residual_history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    }
    notes.push(format!("GMRES monotone {monotone}"));
    // Projector complementarity on the circle.
    let g = grid("circle", &[1.0], 256)?;
    let p = calderon_projectors(&assemble_layer_operators(5.0, &g).map_err(e)?);
    let n = p.minus.n();
    let mut comp = 0.0f64;
    for i in 0..2 * n {
        for j in 0..2 * n {
            let id = if i == j { 1.0 } else { 0.0 };
            comp = comp.max((p.minus.matrix[(i, j)] + p.plus.matrix[(i, j)] - id).norm());
        }
    }
    let zero = BlockOperator { matrix: Mat::zeros(2 * n, 2 * n), grid: g.clone() };
    let cross = p.plus.compose(&p.minus).distance(&zero).map_err(e)?;
    notes.push(format!("‖Π₊+Π₋−I‖max {comp:.1e}, ‖Π₊Π₋‖ {cross:.1e}"));
    // Reflection law and time reversal on random kite rays.
    let kite = Scene::new(vec![Obstacle::Curve(make_curve("kite", &[]).map_err(e)?)], 5.0).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut refl, mut rev) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let (r, phi, th) = (2.5 + 2.4 * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>());
        let nrm = [th.cos(), th.sin()];
        let v = [(th + 1.0).cos(), (th + 1.0).sin()];
        let w = reflect(v, nrm);
        refl = refl.max((w[0] * nrm[0] + w[1] * nrm[1] + v[0] * nrm[0] + v[1] * nrm[1]).abs()).max((w[0].hypot(w[1]) - 1.0).abs());
        let start = [r * phi.cos(), r * phi.sin()];
        let (out, path) = trace_ray_path(&kite, start, [th.cos(), th.sin()], 200.0).map_err(e)?;
        if out.terminated_reason != Termination::Escaped {
            return Ok((false, format!("kite ray from {start:?} did not escape")));
        }
        let end = path[path.len() - 1];
        let last = path[path.len() - 2];
        let d = [last[0] - end[0], last[1] - end[1]];
        let l = d[0].hypot(d[1]);
        let back = [end[0] + 1e-9 * d[0] / l, end[1] + 1e-9 * d[1] / l];
        let (_, rpath) = trace_ray_path(&kite, back, [d[0] / l, d[1] / l], out.escape_time - 1e-9).map_err(e)?;
        if rpath.len() != path.len() {
            return Ok((false, "time-reversed ray took a different number of bounces".into()));
        }
        for (q, p) in rpath.iter().skip(1).zip(path.iter().rev().skip(1)) {
            rev = rev.max((q[0] - p[0]).hypot(q[1] - p[1]));
        }
    }
    notes.push(format!("reflection law {refl:.1e}, time reversal {rev:.1e}"));
    Ok((wr <= 1e-10 && monotone && comp < 1e-12 && cross < 1e-8 && refl < 1e-14 && rev < 1e-9, notes.join("; ")))
}

fn main() {
    let mut suite = Suite { failures: 0 };
    suite.check(1, "oracle link", criterion_1);
    suite.check(2, "Calderón idempotency", criterion_2);
    suite.check(3, "inverse decompositions", criterion_3);
    criteria_4_to_8(&mut suite);
    suite.check(9, "ball sharpness", criterion_9);
    suite.check(10, "pole-free strip", criterion_10);
    suite.check(11, "GMRES sign effect", criterion_11);
    suite.check(12, "scattering end-to-end", criterion_12);
    suite.check(13, "billiards", criterion_13);
    suite.check(14, "property suites", criterion_14);
    println!("{} of 14 criteria failed", suite.failures);
    if suite.failures > 0 {
        std::process::exit(1);
    }
}
