//! Plane-wave scattering by a sound-soft circle centred at the origin.
//!
//! With u_inc = e^{ikx·d} = Σ i^n J_n(kr) e^{in(θ−θ_d)}, the scattered field is
//! u_s = Σ i^n c_n H_n(kr) e^{in(θ−θ_d)}, c_n = −J_n(ka)/H_n(ka).  The Wronskian
//! gives the total normal derivative ∂_r u = Σ i^n (−2i/(πa)) / H_n(ka) e^{in(θ−θ_d)}.
//! Far-field convention: u_s(x) ≈ e^{ikr}/√r · u_∞(θ).

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::specfun::{bessel_sequence, ScaledComplex};

/// Largest tail coefficient |c_{n_max}| tolerated without a warning.
pub const TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct MieSolution {
    pub k: f64,
    pub radius: f64,
    /// Direction of incidence as an angle.
    pub direction: f64,
    pub n_max: usize,
    /// −J_n(ka)/H_n(ka), n = 0..=n_max (even in n), scaled.
    coeff: Vec<ScaledComplex>,
    /// 1/H_n(ka), n = 0..=n_max, scaled.
    inv_h: Vec<ScaledComplex>,
    /// |c_{n_max}|.
    pub tail: f64,
}

pub fn mie_truncation(ka: f64) -> usize {
    (ka.ceil() + 8.0 * ka.cbrt() + 40.0).ceil() as usize
}

fn i_pow(n: i64) -> C64 {
    match n.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Series solution for incidence from angle `direction` (d = (cos, sin)).
pub fn mie_dirichlet(k: f64, radius: f64, direction: f64) -> Result<MieSolution> {
    if !(k > 0.0 && k.is_finite()) || !(radius > 0.0 && radius.is_finite()) || !direction.is_finite() {
        return Err(Error::InvalidParameter(format!("k={k}, radius={radius}, direction={direction}")));
    }
    let ka = k * radius;
    let n_max = mie_truncation(ka);
    let seq = bessel_sequence(n_max, C64::new(ka, 0.0))?;
    let one = ScaledComplex::from_c64(C64::new(1.0, 0.0));
    let coeff: Vec<ScaledComplex> = (0..=n_max).map(|n| seq.j(n).div(seq.hankel1(n)).scale(C64::new(-1.0, 0.0))).collect();
    let inv_h: Vec<ScaledComplex> = (0..=n_max).map(|n| one.div(seq.hankel1(n))).collect();
    let tail = coeff[n_max].value_lossy().norm();
    if tail > TAIL_TOLERANCE {
        log::warn!("Mie series tail {tail:.3e} exceeds {TAIL_TOLERANCE:.0e}");
    }
    Ok(MieSolution { k, radius, direction, n_max, coeff, inv_h, tail })
}

impl MieSolution {
    /// Σ_{|n|≤n_max} i^{|n|} f_{|n|} e^{inφ}; negative orders fold onto
    /// positive ones through J_{−n} = (−1)^n J_n, likewise for H_n.
    fn sum(&self, phi: f64, f: impl Fn(usize) -> Result<C64>) -> Result<C64> {
        let mut acc = f(0)?;
        for n in 1..=self.n_max {
            acc += f(n)? * i_pow(n as i64) * (2.0 * (n as f64 * phi).cos());
        }
        Ok(acc)
    }

    /// Total-field normal derivative ∂ₙu at boundary angle θ.
    pub fn neumann(&self, theta: f64) -> Result<C64> {
        let c = C64::new(0.0, -2.0 / (PI * self.radius));
        self.sum(theta - self.direction, |n| Ok(self.inv_h[n].value_lossy() * c))
    }

    /// ∂ₙu at every angle in `thetas`.
    pub fn boundary_neumann_data(&self, thetas: &[f64]) -> Result<Vec<C64>> {
        thetas.iter().map(|&t| self.neumann(t)).collect()
    }

    /// Far-field pattern u_∞(θ).
    pub fn far_field(&self, theta: f64) -> Result<C64> {
        // H_n(kr) ~ √(2/(πkr)) e^{i(kr − nπ/2 − π/4)}: the factor (−i)^n cancels i^n.
        let c = (2.0 / (PI * self.k)).sqrt() * C64::from_polar(1.0, -PI / 4.0);
        let phi = theta - self.direction;
        let mut acc = self.coeff[0].value_lossy();
        for n in 1..=self.n_max {
            acc += self.coeff[n].value_lossy() * 2.0 * (n as f64 * phi).cos();
        }
        Ok(c * acc)
    }

    pub fn incident(&self, x: [f64; 2]) -> C64 {
        let (s, c) = self.direction.sin_cos();
        C64::from_polar(1.0, self.k * (x[0] * c + x[1] * s))
    }

    /// Scattered field at an exterior point.
    pub fn scattered(&self, x: [f64; 2]) -> Result<C64> {
        let r = x[0].hypot(x[1]);
        if r < self.radius * (1.0 - 1e-12) {
            return Err(Error::Domain(format!("point at radius {r} lies inside the scatterer")));
        }
        let theta = x[1].atan2(x[0]);
        let seq = bessel_sequence(self.n_max, C64::new(self.k * r, 0.0))?;
        self.sum(theta - self.direction, |n| {
            let v = self.coeff[n].mul(seq.hankel1(n)).value()?;
            Ok(v)
        })
    }

    pub fn total(&self, x: [f64; 2]) -> Result<C64> {
        Ok(self.incident(x) + self.scattered(x)?)
    }

    /// Total cross-section ∫|u_∞|² = (4/k) Σ |c_n|² (summed exactly).
    pub fn cross_section(&self) -> f64 {
        let mut s = self.coeff[0].value_lossy().norm_sqr();
        for n in 1..=self.n_max {
            s += 2.0 * self.coeff[n].value_lossy().norm_sqr();
        }
        4.0 / self.k * s
    }

    /// Forward-amplitude side of the optical theorem, −√(8π/k) Re(e^{iπ/4} u_∞(θ_d)).
    pub fn optical_theorem_cross_section(&self) -> Result<f64> {
        let f = self.far_field(self.direction)?;
        Ok(-(8.0 * PI / self.k).sqrt() * (C64::from_polar(1.0, PI / 4.0) * f).re)
    }
}
