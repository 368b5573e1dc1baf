//! Ratio k‖u‖/‖g‖ for u = r^{1−d/2} J_ν(kr) φ on the unit ball, g = (∂_r − ik)u
//! at r = 1, with φ a spherical harmonic of degree μ and
//! ν = ½((d−2)² + 4μ²)^{1/2}.  In both d = 2 and d = 3 the radial integral is
//! ‖u‖² = ∫₀¹ r J_ν(kr)² dr and g = (1 − d/2)J_ν(k) + kJ_ν'(k) − ikJ_ν(k);
//! the angular factor cancels.

use std::cell::RefCell;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::specfun::bessel;

/// Absolute-error target of the radial quadrature relative to the
/// integral's natural size 1/k.
const QUAD_REL_TOL: f64 = 1e-11;

pub fn ball_order(mu: u32, d: u32) -> Result<f64> {
    match d {
        2 | 3 => {
            let dm = d as f64 - 2.0;
            Ok(0.5 * (dm * dm + 4.0 * (mu as f64).powi(2)).sqrt())
        }
        _ => Err(Error::InvalidParameter(format!("dimension {d} not in {{2, 3}}"))),
    }
}

/// ∫₀¹ r J_ν(kr)² dr by double-exponential quadrature on panels of width
/// about one period of the integrand.
pub fn radial_integral(nu: f64, k: f64) -> Result<f64> {
    let panels = (k / 2.0).ceil().max(1.0) as usize;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let f = |r: f64| -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        match bessel(nu, C64::new(k * r, 0.0)) {
            Ok(b) => r * b.j.re * b.j.re,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let target = QUAD_REL_TOL / k / panels as f64;
    let mut total = 0.0;
    let mut err = 0.0;
    for p in 0..panels {
        let (a, b) = (p as f64 / panels as f64, (p + 1) as f64 / panels as f64);
        let out = quadrature::double_exponential::integrate(f, a, b, target);
        total += out.integral;
        err += out.error_estimate;
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if !(total.is_finite() && err <= 10.0 * QUAD_REL_TOL / k) {
        return Err(Error::QuadratureNonConvergence(err));
    }
    Ok(total)
}

/// k‖u‖_{L²(B^d)}/‖g‖_{L²(S^{d−1})}.
pub fn ball_sharpness_ratio(k: f64, mu: u32, d: u32) -> Result<f64> {
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!("k={k} must be ≥ 1")));
    }
    let nu = ball_order(mu, d)?;
    let norm_sq = radial_integral(nu, k)?;
    let b = bessel(nu, C64::new(k, 0.0))?;
    let (j, jp) = (b.j.re, b.jprime.re);
    let g = C64::new((1.0 - d as f64 / 2.0) * j + k * jp, -k * j);
    Ok(k * norm_sq.sqrt() / g.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Lommel: ∫₀¹ r J_ν(kr)² dr = ½[J_ν'(k)² + (1 − ν²/k²)J_ν(k)²].
    fn lommel(nu: f64, k: f64) -> f64 {
        let b = bessel(nu, C64::new(k, 0.0)).unwrap();
        0.5 * (b.jprime.re.powi(2) + (1.0 - nu * nu / (k * k)) * b.j.re.powi(2))
    }

    #[test]
    fn quadrature_matches_lommel() {
        for (nu, k) in [(2.0, 20.0), (17f64.sqrt() / 2.0, 20.0), (2.0, 160.0), (17f64.sqrt() / 2.0, 320.0)] {
            let q = radial_integral(nu, k).unwrap();
            let l = lommel(nu, k);
            assert!((q - l).abs() < 1e-9 * l, "nu={nu} k={k}: {q} {l}");
        }
    }

    #[test]
    fn orders() {
        assert_eq!(ball_order(2, 2).unwrap(), 2.0);
        assert!((ball_order(2, 3).unwrap() - 17f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(ball_order(2, 4).is_err());
    }

    #[test]
    fn two_dimensional_limit() {
        let r = ball_sharpness_ratio(640.0, 2, 2).unwrap();
        assert!((r - 0.5f64.sqrt()).abs() < 0.05, "{r}");
        assert!(ball_sharpness_ratio(0.5, 2, 2).is_err());
    }
}
