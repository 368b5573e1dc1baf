//! Operator norms and map sharpness ratios on the circle from mode
//! symbols.  On a circle the Fourier modes are orthogonal in L²(Γ), so every
//! rotation-invariant operator has L² norm sup_n |symbol_n|.  Suprema include
//! the n → ∞ limits of the symbols (a'_n → ½, |q_n|·n/a → 1, p_n ~ −n/a),
//! which some of them approach from the inside.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::modes::mode_table;
use crate::error::{Error, Result};

/// Mode truncation used wherever a supremum over n is taken.
pub fn mode_truncation(k: f64) -> usize {
    (4.0 * k).ceil() as usize + 100
}

/// Mode-symbol norms of the layer operators, A' and the interior
/// impedance-to-Dirichlet map at one wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeNorms {
    pub k: f64,
    pub n_max: usize,
    pub norm_s: f64,
    pub norm_d: f64,
    pub norm_a: f64,
    pub norm_a_inv: f64,
    pub cond_a: f64,
    /// L² → H¹_k norm of S(A')⁻¹: sup_n |q_n| (n²/a² + k²)^{1/2}.
    pub itd_h1: f64,
    pub dtn_ratio: f64,
    pub ntd_ratio: f64,
}

pub fn mode_norms(k: f64, radius: f64, eta: C64, n_max: usize) -> Result<ModeNorms> {
    let t = mode_table(k, radius, eta, n_max)?;
    let sup = |v: &[C64]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let inf = |v: &[C64]| v.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let weight = |n: usize| ((n as f64 / radius).powi(2) + k * k).sqrt();
    let a_min = inf(&t.a_prime).min(0.5);
    if a_min == 0.0 {
        return Err(Error::Singular(0.0));
    }
    let norm_a = sup(&t.a_prime).max(0.5);
    let itd_h1 = t.q.iter().enumerate().map(|(n, q)| q.norm() * weight(n)).fold(1.0, f64::max);
    let dtn_ratio = t.p.iter().enumerate().map(|(n, p)| p.norm() / weight(n)).fold(1.0, f64::max);
    let ntd_ratio = t.p.iter().enumerate().map(|(n, p)| weight(n) / p.norm()).fold(1.0, f64::max) * k.powf(-1.0 / 3.0);
    Ok(ModeNorms {
        k,
        n_max,
        norm_s: sup(&t.s),
        norm_d: sup(&t.d),
        norm_a,
        norm_a_inv: 1.0 / a_min,
        cond_a: norm_a / a_min,
        itd_h1,
        dtn_ratio,
        ntd_ratio,
    })
}

/// Coercivity constant of A' on a circle: the operator is normal, so its
/// numerical range is the closed convex hull of the symbols a'_n (and their
/// limit ½), and max_θ min_n Re(e^{iθ}a'_n) is sampled on the same θ grid as
/// the matrix path.
pub fn mode_coercivity(k: f64, radius: f64, eta: C64, n_max: usize, theta_samples: usize) -> Result<f64> {
    if theta_samples < 360 {
        return Err(Error::InvalidParameter(format!("theta_samples {theta_samples} < 360")));
    }
    let t = mode_table(k, radius, eta, n_max)?;
    Ok((0..theta_samples)
        .map(|s| {
            let e = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * s as f64 / theta_samples as f64);
            t.a_prime.iter().map(|a| (e * a).re).fold((e * 0.5).re, f64::min)
        })
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Mode norms on the unit circle with η = a·k + i·b at each k, using the
/// standard truncation.
pub fn mode_path(k_grid: &[f64], a: f64, b: f64) -> Result<Vec<ModeNorms>> {
    check_grid(k_grid)?;
    k_grid.iter().map(|&k| mode_norms(k, 1.0, C64::new(a * k, b), mode_truncation(k))).collect()
}

fn check_grid(k_grid: &[f64]) -> Result<()> {
    if k_grid.is_empty() {
        return Err(Error::InvalidParameter("empty wavenumber grid".into()));
    }
    if k_grid.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
        return Err(Error::InvalidParameter("wavenumbers must be positive and finite".into()));
    }
    if k_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("wavenumber grid must be strictly ascending".into()));
    }
    Ok(())
}

/// Per-k suprema over modes of the DtN and NtD ratios on a circle:
///
/// * `dtn_ratio` = sup |p_n| / (n²/a² + k²)^{1/2}  (L² ← H¹_k form)
/// * `ntd_ratio` = sup (n²/a² + k²)^{1/2} / |p_n| · k^{−1/3}  (H¹_k ← L², β = 2/3)
/// * `dtn_half` = sup |p_n| / (k (1 + n²)^{1/2})  (H^{−1/2} ← H^{1/2}, relative to k)
/// * `ntd_half` = sup (1 + n²)^{1/2} / |p_n| · k^{−1/3}  (H^{1/2} ← H^{−1/2})
///
/// The half-order forms use the unweighted Fourier norms (1 + n²)^{±1/4}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessSweep {
    pub k: Vec<f64>,
    pub dtn_ratio: Vec<f64>,
    pub ntd_ratio: Vec<f64>,
    pub dtn_half: Vec<f64>,
    pub ntd_half: Vec<f64>,
}

pub fn sharpness_sweep(k_grid: &[f64], radius: f64) -> Result<SharpnessSweep> {
    sharpness_sweep_truncated(k_grid, radius, mode_truncation)
}

/// As [`sharpness_sweep`] with an explicit truncation rule.
pub fn sharpness_sweep_truncated(k_grid: &[f64], radius: f64, n_of_k: impl Fn(f64) -> usize) -> Result<SharpnessSweep> {
    check_grid(k_grid)?;
    let mut out = SharpnessSweep { k: k_grid.to_vec(), dtn_ratio: vec![], ntd_ratio: vec![], dtn_half: vec![], ntd_half: vec![] };
    for &k in k_grid {
        let t = mode_table(k, radius, C64::new(k, 0.0), n_of_k(k))?;
        // Start from the n → ∞ limits.
        let (mut dr, mut nr, mut dh, mut nh) = (1.0f64, 1.0f64, 1.0 / (radius * k), radius);
        for (n, p) in t.p.iter().enumerate() {
            let nf = n as f64;
            let w = ((nf / radius).powi(2) + k * k).sqrt();
            let u = (1.0 + nf * nf).sqrt();
            let ap = p.norm();
            dr = dr.max(ap / w);
            nr = nr.max(w / ap);
            dh = dh.max(ap / (k * u));
            nh = nh.max(u / ap);
        }
        let scale = k.powf(-1.0 / 3.0);
        out.dtn_ratio.push(dr);
        out.ntd_ratio.push(nr * scale);
        out.dtn_half.push(dh);
        out.ntd_half.push(nh * scale);
    }
    for v in [&out.dtn_ratio, &out.ntd_ratio, &out.dtn_half, &out.ntd_half] {
        if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::NonFinite("sharpness ratio".into()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_coercivity_matches_matrix_numerical_range() {
        use crate::assembly::assemble_layer_operators;
        use crate::geom::{boundary_grid, make_curve};
        use crate::linalg::coercivity_constant;
        use crate::operators::{build_combined_a, EtaSpec};
        let k = 6.0;
        let grid = std::sync::Arc::new(boundary_grid(&make_curve("circle", &[1.0]).unwrap(), 128).unwrap());
        let a = build_combined_a(&assemble_layer_operators(k, &grid).unwrap(), &EtaSpec::constant(1.0, 0.0)).unwrap();
        let matrix = coercivity_constant(&a, 720).unwrap();
        let modes = mode_coercivity(k, 1.0, C64::new(k, 0.0), mode_truncation(k), 720).unwrap();
        // The grid only holds |n| < 64, whose symbols sit slightly inside the
        // limit ½ that bounds the continuum numerical range.
        assert!(modes <= matrix + 1e-9 && matrix - modes < 5e-3, "{matrix} vs {modes}");
    }

    #[test]
    fn truncation_doubling_is_stable() {
        let ks = [20.0, 80.0, 320.0];
        let a = sharpness_sweep(&ks, 1.0).unwrap();
        let b = sharpness_sweep_truncated(&ks, 1.0, |k| 2 * mode_truncation(k)).unwrap();
        for i in 0..ks.len() {
            for (x, y) in [(a.dtn_ratio[i], b.dtn_ratio[i]), (a.ntd_ratio[i], b.ntd_ratio[i]), (a.dtn_half[i], b.dtn_half[i]), (a.ntd_half[i], b.ntd_half[i])] {
                assert!((x - y).abs() < 1e-8, "{x} {y}");
            }
        }
        for &k in &ks {
            let m1 = mode_norms(k, 1.0, C64::new(k, 0.0), mode_truncation(k)).unwrap();
            let m2 = mode_norms(k, 1.0, C64::new(k, 0.0), 2 * mode_truncation(k)).unwrap();
            for (x, y) in [(m1.norm_s, m2.norm_s), (m1.norm_d, m2.norm_d), (m1.norm_a_inv, m2.norm_a_inv), (m1.cond_a, m2.cond_a), (m1.itd_h1, m2.itd_h1)] {
                assert!((x - y).abs() < 1e-8, "{x} {y}");
            }
        }
    }

    #[test]
    fn zero_mode_dtn_tends_to_k() {
        for k in [50.0, 400.0] {
            let t = mode_table(k, 1.0, C64::new(k, 0.0), 0).unwrap();
            assert!((t.p[0].norm() / k - 1.0).abs() < 2.0 / k);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(sharpness_sweep(&[], 1.0).is_err());
        assert!(sharpness_sweep(&[2.0, 1.0], 1.0).is_err());
        assert!(mode_path(&[-1.0], 1.0, 0.0).is_err());
    }
}
