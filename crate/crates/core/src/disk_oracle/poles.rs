//! Complex-k zeros of the interior impedance mode determinants on the unit
//! disk.  Mode n of the problem Δu + k²u = 0, ∂ₙu − i(ak + ib)u = g has the
//! determinant d_n(k) = kJ_n'(k) − i(ak + ib)J_n(k); the scan works with the
//! normalised form f_n = d_n/J_n = kJ_n'/J_n − i(ak + ib), whose zeros are
//! those of d_n (J_n and J_n' never vanish together) and whose limit at the
//! origin is f_n(0) = n + b.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::{bessel_sequence, MAX_IMAG};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleScanConfig {
    pub a: f64,
    pub b: f64,
    pub re_window: (f64, f64),
    pub im_window: (f64, f64),
    /// Grid points per unit length in each direction.
    pub grid_density: f64,
    pub n_max: usize,
}

impl Default for PoleScanConfig {
    fn default() -> Self {
        Self { a: 1.0, b: 1.0, re_window: (1.0, 40.0), im_window: (-2.0, 0.5), grid_density: 20.0, n_max: 60 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pole {
    pub k_re: f64,
    pub k_im: f64,
    pub n: usize,
    /// False when Newton refinement failed and `k` is the grid minimiser.
    pub refined: bool,
    /// |f_n(k)| at the reported point.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleScan {
    pub config: PoleScanConfig,
    /// Refined zeros inside the window, sorted by decreasing Im k.
    pub poles: Vec<Pole>,
    /// Grid minimisers whose refinement failed.
    pub unrefined: Vec<Pole>,
    /// Refined zeros with Im k ≥ 0.
    pub upper_half_count: usize,
    /// −max Im k over refined zeros (None when none were found).
    pub eps_hat: Option<f64>,
    /// f_n(0) = n + b for n = 0..=n_max, evaluated as a limit.
    pub origin_values: Vec<f64>,
    /// Some mode determinant vanishes at k = 0.
    pub origin_degenerate: bool,
}

/// (f_n(k), f_n'(k)) for n = 0..=n_max.
fn mode_functions(k: C64, a: f64, b: f64, n_max: usize) -> Result<Vec<(C64, C64)>> {
    let seq = bessel_sequence(n_max, k)?;
    let i = C64::i();
    (0..=n_max)
        .map(|n| {
            let rho = seq.jprime(n).div(seq.j(n)).value()?;
            let nf = n as f64;
            let f = k * rho - i * (a * k + i * b);
            // J'' = −J'/k − (1 − n²/k²)J gives (kJ'/J)' = −(k − n²/k) − kρ².
            let df = -(k - nf * nf / k) - k * rho * rho - i * a;
            Ok((f, df))
        })
        .collect()
}

fn check(cfg: &PoleScanConfig) -> Result<()> {
    let (r0, r1) = cfg.re_window;
    let (i0, i1) = cfg.im_window;
    if !(cfg.a > 0.0 && cfg.a.is_finite()) || !(cfg.b >= 0.0 && cfg.b.is_finite()) {
        return Err(Error::InvalidParameter(format!("need a > 0 and b ≥ 0, got a={}, b={}", cfg.a, cfg.b)));
    }
    if !(r0 > 0.0 && r1 > r0 && r1 <= 40.0) {
        return Err(Error::InvalidParameter(format!("real window ({r0}, {r1}) must satisfy 0 < lo < hi ≤ 40")));
    }
    if !(i1 > i0 && i0 >= -MAX_IMAG && i1 <= MAX_IMAG) {
        return Err(Error::InvalidParameter(format!("imaginary window ({i0}, {i1}) outside [−{MAX_IMAG}, {MAX_IMAG}]")));
    }
    if !(cfg.grid_density >= 1.0 && cfg.grid_density <= 200.0) {
        return Err(Error::InvalidParameter(format!("grid density {} outside [1, 200]", cfg.grid_density)));
    }
    if cfg.n_max > 400 {
        return Err(Error::InvalidParameter(format!("n_max {} exceeds 400", cfg.n_max)));
    }
    Ok(())
}

fn newton(k0: C64, n: usize, cfg: &PoleScanConfig) -> Option<(C64, f64)> {
    let mut k = k0;
    for _ in 0..60 {
        let (f, df) = mode_functions(k, cfg.a, cfg.b, n).ok()?[n];
        if df.norm() == 0.0 || !f.is_finite() {
            return None;
        }
        let step = f / df;
        k -= step;
        if step.norm() <= 1e-13 * (1.0 + k.norm()) {
            let (f, _) = mode_functions(k, cfg.a, cfg.b, n).ok()?[n];
            let scale = 1.0 + k.norm() + n as f64;
            return (f.norm() <= 1e-9 * scale).then_some((k, f.norm()));
        }
    }
    None
}

/// Scans the window for local minima of |f_n| and refines them by Newton.
pub fn impedance_pole_scan(cfg: &PoleScanConfig) -> Result<PoleScan> {
    check(cfg)?;
    let (r0, r1) = cfg.re_window;
    let (i0, i1) = cfg.im_window;
    let nx = ((r1 - r0) * cfg.grid_density).ceil() as usize + 1;
    let ny = ((i1 - i0) * cfg.grid_density).ceil() as usize + 1;
    let at = |ix: usize, iy: usize| {
        C64::new(r0 + (r1 - r0) * ix as f64 / (nx - 1) as f64, i0 + (i1 - i0) * iy as f64 / (ny - 1) as f64)
    };
    let nm = cfg.n_max + 1;
    // values[(ix * ny + iy) * nm + n] = |f_n|
    let rows: Vec<Vec<f64>> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let k = at(idx / ny, idx % ny);
            Ok(mode_functions(k, cfg.a, cfg.b, cfg.n_max)?.iter().map(|(f, _)| f.norm()).collect())
        })
        .collect::<Result<_>>()?;
    let mut candidates = Vec::new();
    for n in 0..nm {
        let v = |ix: usize, iy: usize| rows[ix * ny + iy][n];
        for ix in 0..nx {
            for iy in 0..ny {
                let c = v(ix, iy);
                let mut is_min = c.is_finite();
                for dx in -1i64..=1 {
                    for dy in -1i64..=1 {
                        let (jx, jy) = (ix as i64 + dx, iy as i64 + dy);
                        if (dx, dy) == (0, 0) || jx < 0 || jy < 0 || jx >= nx as i64 || jy >= ny as i64 {
                            continue;
                        }
                        if v(jx as usize, jy as usize) < c {
                            is_min = false;
                        }
                    }
                }
                if is_min {
                    candidates.push((n, at(ix, iy), c, ix == 0 || iy == 0 || ix == nx - 1 || iy == ny - 1));
                }
            }
        }
    }
    let inside = |k: C64| k.re >= r0 - 1e-9 && k.re <= r1 + 1e-9 && k.im >= i0 - 1e-9 && k.im <= i1 + 1e-9;
    let refined: Vec<(usize, C64, f64, bool, Option<(C64, f64)>)> =
        candidates.into_par_iter().map(|(n, k0, c, edge)| (n, k0, c, edge, newton(k0, n, cfg))).collect();
    let mut poles: Vec<Pole> = Vec::new();
    let mut unrefined = Vec::new();
    for (n, k0, c, edge, r) in refined {
        match r {
            Some((k, res)) if inside(k) => {
                let dup = poles.iter().any(|p| p.n == n && (C64::new(p.k_re, p.k_im) - k).norm() < 1e-7 * (1.0 + k.norm()));
                if !dup {
                    poles.push(Pole { k_re: k.re, k_im: k.im, n, refined: true, residual: res });
                }
            }
            Some(_) => {}
            None if !edge => {
                unrefined.push(Pole { k_re: k0.re, k_im: k0.im, n, refined: false, residual: c });
            }
            None => {}
        }
    }
    poles.sort_by(|p, q| q.k_im.total_cmp(&p.k_im).then(p.k_re.total_cmp(&q.k_re)));
    let upper_half_count = poles.iter().filter(|p| p.k_im >= 0.0).count();
    let eps_hat = poles.first().map(|p| -p.k_im);
    let origin = mode_functions(C64::new(1e-8, 0.0), cfg.a, cfg.b, cfg.n_max)?;
    let origin_values: Vec<f64> = origin.iter().map(|(f, _)| f.re).collect();
    let origin_degenerate = origin.iter().any(|(f, _)| f.norm() < 1e-6);
    Ok(PoleScan { config: *cfg, poles, unrefined, upper_half_count, eps_hat, origin_values, origin_degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_values_are_n_plus_b() {
        let cfg = PoleScanConfig { re_window: (1.0, 3.0), im_window: (-1.0, 0.5), n_max: 4, ..Default::default() };
        let s = impedance_pole_scan(&cfg).unwrap();
        for (n, v) in s.origin_values.iter().enumerate() {
            assert!((v - (n as f64 + 1.0)).abs() < 1e-6);
        }
        assert!(!s.origin_degenerate);
        let s0 = impedance_pole_scan(&PoleScanConfig { b: 0.0, ..cfg }).unwrap();
        assert!(s0.origin_degenerate);
    }

    #[test]
    fn refined_zeros_satisfy_determinant() {
        let cfg = PoleScanConfig { re_window: (1.0, 8.0), im_window: (-2.0, 0.5), n_max: 12, ..Default::default() };
        let s = impedance_pole_scan(&cfg).unwrap();
        assert!(!s.poles.is_empty());
        for p in &s.poles {
            // Unnormalised d_n = kJ' − i(ak + ib)J through pointwise Bessel values.
            let k = C64::new(p.k_re, p.k_im);
            let bz = crate::specfun::bessel(p.n as f64, k).unwrap();
            let d = k * bz.jprime - C64::i() * (k + C64::i()) * bz.j;
            assert!(d.norm() < 1e-8 * (bz.j.norm() + (k * bz.jprime).norm()), "{p:?}");
            assert!(p.k_im < 0.0);
        }
    }

    #[test]
    fn rejects_bad_windows() {
        assert!(impedance_pole_scan(&PoleScanConfig { re_window: (0.0, 5.0), ..Default::default() }).is_err());
        assert!(impedance_pole_scan(&PoleScanConfig { a: 0.0, ..Default::default() }).is_err());
        assert!(impedance_pole_scan(&PoleScanConfig { im_window: (-20.0, 0.0), ..Default::default() }).is_err());
    }
}
