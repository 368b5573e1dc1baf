//! Fast real-argument evaluations used inside matrix assembly, where
//! millions of kernel values are needed and only orders 0 and 1 occur.

use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Above this argument the Hankel asymptotic expansion is accurate to
/// double precision (its smallest term is of size e^{-2x}).
pub(crate) const ASYMPTOTIC_SWITCH: f64 = 20.0;

/// (J0, J1, Y0, Y1) at real x > 0.
pub(crate) fn bessel01(x: f64) -> [f64; 4] {
    if x >= ASYMPTOTIC_SWITCH {
        bessel01_asymptotic(x)
    } else {
        bessel01_miller(x)
    }
}

pub(crate) fn bessel01_miller(x: f64) -> [f64; 4] {
    let m_start = super::recurrence::miller_start(2, x);
    let two_over_x = 2.0 / x;
    let (mut f_next, mut f) = (0.0f64, 1.0f64);
    let (mut norm, mut t0, mut t1) = (0.0f64, 0.0f64, 0.0f64);
    let mut f1 = 0.0;
    let mut m = m_start;
    loop {
        if m == 1 {
            f1 = f;
        }
        if m == 0 {
            norm += f;
            break;
        }
        if m % 2 == 0 {
            norm += 2.0 * f;
            let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
            t0 += f * sign / (m / 2) as f64;
        } else {
            let mf = m as f64;
            let up = if ((m + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let mut c = up / (mf + 1.0);
            if m >= 3 {
                let down = if ((m - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                c -= down / (mf - 1.0);
            }
            t1 += f * c;
        }
        let prev = two_over_x * m as f64 * f - f_next;
        f_next = f;
        f = prev;
        m -= 1;
        if f.abs() > 1e250 {
            f *= 1e-250;
            f_next *= 1e-250;
            f1 *= 1e-250;
            norm *= 1e-250;
            t0 *= 1e-250;
            t1 *= 1e-250;
        }
    }
    let c = 1.0 / norm;
    let j0 = f * c;
    let j1 = f1 * c;
    let lg = (x / 2.0).ln() + EULER_GAMMA;
    let y0 = (2.0 / PI) * lg * j0 - (4.0 / PI) * t0 * c;
    let y1 = -((2.0 / PI) * (j0 / x - lg * j1) - (4.0 / PI) * t1 * c);
    [j0, j1, y0, y1]
}

/// Hankel's expansion: J = √(2/πx)(P cos ω − Q sin ω), Y = √(2/πx)(P sin ω + Q cos ω).
pub(crate) fn bessel01_asymptotic(x: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    for nu in 0..2 {
        let mu = 4.0 * (nu * nu) as f64;
        let (mut p, mut q) = (1.0, 0.0);
        let mut a = 1.0;
        let mut last = f64::INFINITY;
        for k in 1..200 {
            let kf = k as f64;
            a *= (mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * x);
            if a.abs() > last || a.abs() < 1e-18 {
                break;
            }
            last = a.abs();
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 0 {
                p += sign * a;
            } else {
                q += sign * a;
            }
        }
        let w = x - (nu as f64) * PI / 2.0 - PI / 4.0;
        let amp = (2.0 / (PI * x)).sqrt();
        let (s, c) = w.sin_cos();
        out[nu] = amp * (p * c - q * s);
        out[2 + nu] = amp * (p * s + q * c);
    }
    out
}

/// Modified Bessel I_0 by its (positive-term) power series.
pub(crate) fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > 1e-17 * sum || k < q.sqrt() {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
        if k > 5000.0 {
            break;
        }
    }
    sum
}

/// Modified Bessel K_0 at real x > 0.
///
/// Small x: logarithmic series; moderate x: trapezoid rule on
/// K_0(x) = ∫_0^∞ e^{−x cosh t} dt (exponentially convergent);
/// large x: asymptotic expansion.
pub(crate) fn bessel_k0(x: f64) -> f64 {
    if x <= 2.0 {
        let q = x * x / 4.0;
        let lg = (x / 2.0).ln() + EULER_GAMMA;
        let mut term = 1.0;
        let mut harmonic = 0.0;
        let mut sum = -lg;
        let mut k = 1.0;
        loop {
            term *= q / (k * k);
            harmonic += 1.0 / k;
            let add = term * (harmonic - lg);
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
            k += 1.0;
        }
        sum
    } else if x < 25.0 {
        let h = 0.1;
        let t_max = (1.0 + 40.0 / x).acosh();
        let n = (t_max / h).ceil() as usize;
        let mut s = 0.5 * (-x).exp();
        for i in 1..=n {
            s += (-x * (i as f64 * h).cosh()).exp();
        }
        s * h
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut last = f64::INFINITY;
        for k in 1..200 {
            let kf = k as f64;
            term *= -(2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
            if term.abs() > last || term.abs() < 1e-18 {
                break;
            }
            last = term.abs();
            sum += term;
        }
        (PI / (2.0 * x)).sqrt() * (-x).exp() * sum
    }
}
