//! Fourier-mode symbols of the boundary operators on a circle of radius a.
//!
//! For u = J_n(kr)e^{inθ} (interior) and H_n^{(1)}(kr)e^{inθ} (exterior),
//! separation of variables in the layer-potential kernels gives
//!
//! * s_n  = (iπa/2) J_n H_n
//! * d_n  = d'_n = (iπka/4)(J_n H_n' + J_n' H_n)
//! * h_n  = (iπk²a/2) J_n' H_n'
//!
//! all at argument ka.  Products are formed from exponent-scaled values so
//! that every order up to the truncation stays finite.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::specfun::{bessel_sequence, ScaledComplex};

/// Per-mode symbols for |n| ≤ n_max (all symbols are even in n).
#[derive(Debug, Clone)]
pub struct ModeTable {
    pub k: f64,
    pub radius: f64,
    pub eta: C64,
    pub n_max: usize,
    pub s: Vec<C64>,
    pub d: Vec<C64>,
    pub dadj: Vec<C64>,
    pub h: Vec<C64>,
    pub a_prime: Vec<C64>,
    pub b: Vec<C64>,
    pub p: Vec<C64>,
    pub q: Vec<C64>,
}

/// Largest n_max accepted by [`mode_table`].
pub const MAX_MODES: usize = 30_000;

fn value(x: ScaledComplex, what: &str) -> Result<C64> {
    let v = x.value()?;
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Symbols of S, D, D', H, A' = ½ + D' − iηS, B = H + iη(½ − D), the exterior
/// DtN symbol p_n = kH_n'/H_n and the interior impedance-to-Dirichlet
/// symbol q_n = J_n/(kJ_n' − iηJ_n).
pub fn mode_table(k: f64, radius: f64, eta: C64, n_max: usize) -> Result<ModeTable> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!("wavenumber {k} must be positive")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius {radius} must be positive")));
    }
    if n_max > MAX_MODES {
        return Err(Error::InvalidParameter(format!("n_max {n_max} exceeds {MAX_MODES}")));
    }
    let x = k * radius;
    let seq = bessel_sequence(n_max, C64::new(x, 0.0))?;
    let i = C64::i();
    let pi = std::f64::consts::PI;
    let mut t = ModeTable {
        k,
        radius,
        eta,
        n_max,
        s: Vec::with_capacity(n_max + 1),
        d: Vec::with_capacity(n_max + 1),
        dadj: Vec::with_capacity(n_max + 1),
        h: Vec::with_capacity(n_max + 1),
        a_prime: Vec::with_capacity(n_max + 1),
        b: Vec::with_capacity(n_max + 1),
        p: Vec::with_capacity(n_max + 1),
        q: Vec::with_capacity(n_max + 1),
    };
    for n in 0..=n_max {
        let (j, jp) = (seq.j(n), seq.jprime(n));
        let (hn, hp) = (seq.hankel1(n), seq.hankel1_prime(n));
        let s = value(j.mul(hn), "J·H")? * (i * pi * radius / 2.0);
        let d = value(j.mul(hp).add(jp.mul(hn)), "(J·H)'")? * (i * pi * k * radius / 4.0);
        let h = value(jp.mul(hp), "J'·H'")? * (i * pi * k * k * radius / 2.0);
        let p = value(hp.div(hn), "H'/H")? * k;
        let ratio = value(jp.div(j), "J'/J")?;
        let q = 1.0 / (k * ratio - i * eta);
        t.s.push(s);
        t.d.push(d);
        t.dadj.push(d);
        t.h.push(h);
        t.a_prime.push(0.5 + d - i * eta * s);
        t.b.push(h + i * eta * (0.5 - d));
        t.p.push(p);
        t.q.push(q);
    }
    Ok(t)
}

impl ModeTable {
    /// Index into the symbol vectors for a signed mode number.
    pub fn index(&self, n: i64) -> usize {
        n.unsigned_abs() as usize
    }

    /// Symbols at signed mode n: (s, d, d', h, a', b, p, q).
    pub fn at(&self, n: i64) -> [C64; 8] {
        let m = self.index(n);
        [self.s[m], self.d[m], self.dadj[m], self.h[m], self.a_prime[m], self.b[m], self.p[m], self.q[m]]
    }
}

/// Single-layer symbol of a regularising operator R on a circle of radius a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegularizerSymbol {
    /// Laplace single layer: a/(2|n|), and −a ln a for n = 0.
    S0,
    /// Helmholtz single layer at wavenumber ik: a I_n(ka) K_n(ka).
    Sik,
}

/// Symbols r_n, n = 0..=n_max, of the regulariser.
pub fn regularizer_symbols(kind: RegularizerSymbol, k: f64, radius: f64, n_max: usize) -> Result<Vec<C64>> {
    match kind {
        RegularizerSymbol::S0 => Ok((0..=n_max)
            .map(|n| {
                if n == 0 {
                    C64::new(-radius * radius.ln(), 0.0)
                } else {
                    C64::new(radius / (2.0 * n as f64), 0.0)
                }
            })
            .collect()),
        RegularizerSymbol::Sik => {
            // (iπa/2) J_n(ika) H_n(ika); limited to |ka| ≤ 10 by the complex
            // Bessel domain.
            let seq = bessel_sequence(n_max, C64::new(0.0, k * radius))?;
            let pi = std::f64::consts::PI;
            (0..=n_max)
                .map(|n| Ok(value(seq.j(n).mul(seq.hankel1(n)), "J·H")? * C64::new(0.0, pi * radius / 2.0)))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Independent evaluation of ∫ (i/4)H_0(k|x−y|) e^{inφ} dφ on the unit
    /// circle: Φ + (1/2π)J_0(kr) ln r is analytic in the angle and is summed
    /// by the trapezoid rule; the remaining −(1/2π)J_0(kr) ln r term is
    /// integrated exactly through Graf's expansion J_0(kr) = Σ_m J_m(k)² e^{ims}
    /// and ∫ ln|2 sin(s/2)| e^{ips} ds = −π/|p|.
    fn quadrature_single_layer(k: f64, n: i32) -> C64 {
        use crate::specfun::bessel;
        let m = 256;
        let h = 2.0 * PI / m as f64;
        let euler = 0.577_215_664_901_532_9;
        let mut acc = C64::new(-h * ((k / 2.0).ln() + euler) / (2.0 * PI), 0.25 * h);
        for j in 1..m {
            let s = 2.0 * PI * j as f64 / m as f64;
            let r = 2.0 * (s / 2.0).sin();
            let b = bessel(0.0, C64::new(k * r, 0.0)).unwrap();
            let smooth = C64::new(0.0, 0.25) * b.hankel1() + b.j * r.ln() / (2.0 * PI);
            acc += smooth * C64::from_polar(h, n as f64 * s);
        }
        let mut log_part = 0.0;
        for mm in -60i32..=60 {
            let p = n + mm;
            if p != 0 {
                let jm = bessel(mm.unsigned_abs() as f64, C64::new(k, 0.0)).unwrap().j.re;
                log_part += jm * jm * (-PI / p.abs() as f64);
            }
        }
        acc - log_part / (2.0 * PI)
    }

    #[test]
    fn single_layer_symbol_matches_quadrature() {
        let t = mode_table(5.0, 1.0, C64::new(5.0, 0.0), 10).unwrap();
        for n in 0..=10 {
            let q = quadrature_single_layer(5.0, n);
            assert!((t.s[n as usize] - q).norm() < 1e-10, "n={n}: {} vs {q}", t.s[n as usize]);
        }
    }

    #[test]
    fn maue_identity_on_symbols() {
        let k = 7.0;
        let t = mode_table(k, 1.0, C64::new(k, 0.0), 30).unwrap();
        for n in 1..29 {
            let maue = -(n as f64).powi(2) * t.s[n] + k * k * (t.s[n + 1] + t.s[n - 1]) / 2.0;
            assert!((maue - t.h[n]).norm() < 1e-12 * t.h[n].norm());
        }
    }

    #[test]
    fn laplace_regularizer_symbol() {
        let r = regularizer_symbols(RegularizerSymbol::S0, 1.0, 0.8, 3).unwrap();
        assert!((r[0].re + 0.8 * 0.8f64.ln()).abs() < 1e-15);
        assert!((r[2].re - 0.2).abs() < 1e-15);
    }
}
