//! Miller backward recurrence, Neumann-series normalisation and ascending
//! power series for Bessel functions of complex argument.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use statrs::function::gamma::{gamma, ln_gamma};

use super::scaled::ScaledComplex;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Rescale the recurrence whenever a magnitude exceeds 2^RESCALE_BITS.
const RESCALE_BITS: i32 = 500;

fn rescale_limit() -> f64 {
    2f64.powi(RESCALE_BITS)
}

fn rescale_factor() -> f64 {
    2f64.powi(-RESCALE_BITS)
}

/// Backward-recurrence starting order (always even) that leaves the
/// requested orders accurate to full double precision.
pub(crate) fn miller_start(n_top: usize, abs_z: f64) -> usize {
    let base = (n_top as f64).max(abs_z);
    let m = base + 15.0 * abs_z.cbrt() + 40.0;
    let m = m.ceil() as usize;
    m + (m % 2)
}

/// J_n and Y_n for n = 0..=n_top+1 at integer order.
pub(crate) struct IntegerSequences {
    pub j: Vec<ScaledComplex>,
    pub y: Vec<ScaledComplex>,
}

/// Integer-order J_n(z), Y_n(z) for n = 0..=n_top+1 (z ≠ 0).
///
/// J comes from Miller's algorithm normalised by the generating-function sum;
/// Y_0 and Y_1 from the Neumann series in the same backward pass, then Y is
/// carried upward by forward recurrence (stable for the dominant solution).
pub(crate) fn integer_sequences(z: C64, n_top: usize) -> IntegerSequences {
    let n_store = n_top + 2;
    let m_start = miller_start(n_store, z.norm());
    let two_over_z = 2.0 / z;
    let real_arg = z.im == 0.0;
    // Weight for the normalisation sum: e^{-isz} = J_0 + 2 Σ (-is)^m J_m.
    let s = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let minus_is = C64::new(0.0, -s);

    let mut stored = vec![C64::new(0.0, 0.0); n_store];
    let mut stored_level = vec![0i32; n_store];
    let mut level = 0i32;

    let mut f_next = C64::new(0.0, 0.0);
    let mut f = C64::new(1.0, 0.0);
    let mut norm_sum = C64::new(0.0, 0.0);
    let mut t0 = C64::new(0.0, 0.0);
    let mut t1 = C64::new(0.0, 0.0);
    // (-is)^m tracked as a unit complex number; m_start is even.
    let mut phase = if m_start % 4 == 0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) };
    let inv_minus_is = C64::new(1.0, 0.0) / minus_is;

    let mut m = m_start;
    loop {
        // f holds f_m, f_next holds f_{m+1}.
        if m < n_store {
            stored[m] = f;
            stored_level[m] = level;
        }
        if m > 0 {
            if real_arg {
                if m % 2 == 0 {
                    norm_sum += 2.0 * f;
                }
            } else {
                norm_sum += 2.0 * phase * f;
            }
            if m % 2 == 0 {
                let k = (m / 2) as f64;
                let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
                t0 += f * (sign / k);
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
        } else {
            norm_sum += f;
            break;
        }
        let f_prev = two_over_z * (m as f64) * f - f_next;
        f_next = f;
        f = f_prev;
        phase *= inv_minus_is;
        m -= 1;
        let big = f.re.abs().max(f.im.abs());
        if big > rescale_limit() {
            let r = rescale_factor();
            f *= r;
            f_next *= r;
            norm_sum *= r;
            t0 *= r;
            t1 *= r;
            level += 1;
        }
    }

    let target = if real_arg { C64::new(1.0, 0.0) } else { (-s * C64::i() * z).exp() };
    let c = target / norm_sum;

    let j: Vec<ScaledComplex> = (0..n_store)
        .map(|m| ScaledComplex::new(stored[m] * c, -RESCALE_BITS * (level - stored_level[m])))
        .collect();

    let j0 = stored[0] * c;
    let j1 = stored[1] * c * 2f64.powi(-RESCALE_BITS * (level - stored_level[1]));
    let lg = (z / 2.0).ln() + EULER_GAMMA;
    let y0 = (2.0 / PI) * lg * j0 - (4.0 / PI) * t0 * c;
    // Y_0' from differentiating the Neumann series term by term.
    let y0p = (2.0 / PI) * (j0 / z - lg * j1) - (4.0 / PI) * t1 * c;
    let y1 = -y0p;

    let mut y = Vec::with_capacity(n_store);
    y.push(ScaledComplex::from_c64(y0));
    if n_store > 1 {
        y.push(ScaledComplex::from_c64(y1));
    }
    let mut prev = y0;
    let mut cur = y1;
    let mut exp = 0i32;
    for n in 1..n_store.saturating_sub(1) {
        let next = two_over_z * (n as f64) * cur - prev;
        prev = cur;
        cur = next;
        let big = cur.re.abs().max(cur.im.abs());
        if big > rescale_limit() {
            let r = rescale_factor();
            prev *= r;
            cur *= r;
            exp += RESCALE_BITS;
        }
        y.push(ScaledComplex::new(cur, exp));
    }
    IntegerSequences { j, y }
}

/// J_{ν0+m}(z) for m = 0..=n_top+1 with ν0 ∈ (0, 1), by Miller's algorithm
/// normalised with (z/2)^{ν0} = Σ_k (ν0+2k) Γ(ν0+k)/k! · J_{ν0+2k}(z).
pub(crate) fn fractional_j_sequence(nu0: f64, z: C64, n_top: usize) -> Vec<ScaledComplex> {
    let n_store = n_top + 2;
    let m_start = miller_start(n_store, z.norm());
    // Normalisation weights w_k for even m = 2k, built forward in log space.
    let k_max = m_start / 2;
    let mut ln_w = Vec::with_capacity(k_max + 1);
    let mut lw = ln_gamma(nu0 + 1.0);
    ln_w.push(lw);
    for k in 1..=k_max {
        let kf = k as f64;
        lw += ((nu0 + 2.0 * kf) / (nu0 + 2.0 * kf - 2.0)).ln() + ((nu0 + kf - 1.0) / kf).ln();
        ln_w.push(lw);
    }
    // Work relative to the largest weight to keep the sum in range.
    let ln_w_max = ln_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let mut stored = vec![C64::new(0.0, 0.0); n_store];
    let mut stored_level = vec![0i32; n_store];
    let mut level = 0i32;
    let mut f_next = C64::new(0.0, 0.0);
    let mut f = C64::new(1.0, 0.0);
    let mut norm_sum = C64::new(0.0, 0.0);
    let mut m = m_start;
    loop {
        if m < n_store {
            stored[m] = f;
            stored_level[m] = level;
        }
        if m % 2 == 0 {
            norm_sum += f * (ln_w[m / 2] - ln_w_max).exp();
        }
        if m == 0 {
            break;
        }
        let f_prev = 2.0 * (nu0 + m as f64) / z * f - f_next;
        f_next = f;
        f = f_prev;
        m -= 1;
        let big = f.re.abs().max(f.im.abs());
        if big > rescale_limit() {
            let r = rescale_factor();
            f *= r;
            f_next *= r;
            norm_sum *= r;
            level += 1;
        }
    }
    // target = (z/2)^{ν0} e^{-ln_w_max}
    let target = (nu0 * (z / 2.0).ln() - ln_w_max).exp();
    let c = target / norm_sum;
    (0..n_store)
        .map(|m| ScaledComplex::new(stored[m] * c, -RESCALE_BITS * (level - stored_level[m])))
        .collect()
}

/// Ascending power series for J_ν(z); ν must not be a negative integer.
pub(crate) fn series_j(nu: f64, z: C64) -> ScaledComplex {
    let half = z / 2.0;
    let q = -(half * half);
    // Prefactor (z/2)^ν / Γ(ν+1), evaluated in log space when ν is large.
    let pre = if nu >= 0.0 {
        let ln_pre = nu * half.ln() - ln_gamma(nu + 1.0);
        let e2 = (ln_pre.re / std::f64::consts::LN_2).floor();
        let mant = C64::from_polar((ln_pre.re - e2 * std::f64::consts::LN_2).exp(), ln_pre.im);
        ScaledComplex::new(mant, e2 as i32)
    } else {
        let p = (nu * half.ln()).exp() / gamma(nu + 1.0);
        ScaledComplex::from_c64(p)
    };
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (nu + k));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && k > half.norm() {
            break;
        }
        if k > 2000.0 {
            break;
        }
        k += 1.0;
    }
    pre.mul(ScaledComplex::from_c64(sum))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn miller_matches_series_for_integer_orders() {
        for &z in &[C64::new(1.0, 0.0), C64::new(5.5, 0.0), C64::new(3.0, 2.0), C64::new(-2.0, -4.0)] {
            let seq = integer_sequences(z, 12);
            for n in 0..=12 {
                let s = series_j(n as f64, z).value().unwrap();
                let m = seq.j[n].value().unwrap();
                assert!(rel(m, s) < 1e-12, "n={n} z={z} miller={m} series={s}");
            }
        }
    }

    #[test]
    fn fractional_miller_matches_series() {
        for &nu0 in &[0.25, 0.5, 0.0616] {
            for &z in &[C64::new(2.0, 0.0), C64::new(9.0, 1.5)] {
                let seq = fractional_j_sequence(nu0, z, 6);
                for m in 0..=6 {
                    let s = series_j(nu0 + m as f64, z).value().unwrap();
                    let v = seq[m].value().unwrap();
                    assert!(rel(v, s) < 1e-11, "nu0={nu0} m={m} z={z}: {v} vs {s}");
                }
            }
        }
    }

    #[test]
    fn half_order_closed_form() {
        // J_{1/2}(x) = sqrt(2/(πx)) sin x
        let x = 30.0;
        let seq = fractional_j_sequence(0.5, C64::new(x, 0.0), 0);
        let expect = (2.0 / (PI * x)).sqrt() * x.sin();
        assert!((seq[0].value().unwrap().re - expect).abs() < 1e-14);
    }
}
