//! Periodic quadrature and interpolation tables on equispaced grids.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64 as C64;

/// Weights R(2πd/M), d = 0..M, of the product rule for
/// ∫_0^{2π} ln(4 sin²((t−τ)/2)) f(τ) dτ ≈ Σ_d R(t − τ_d) f(τ_d),
/// exact for trigonometric polynomials of degree < M/2.
pub(crate) fn log_weights(m: usize) -> Vec<f64> {
    let n = m / 2;
    let nf = n as f64;
    (0..m)
        .map(|d| {
            let s = 2.0 * PI * d as f64 / m as f64;
            let mut acc = 0.0;
            for p in 1..n {
                acc += (p as f64 * s).cos() / p as f64;
            }
            -2.0 * PI / nf * acc - PI / (nf * nf) * (nf * s).cos()
        })
        .collect()
}

/// ln(4 sin²(πd/M)) for d = 1..M (entry 0 is unused and set to 0).
pub(crate) fn log_table(m: usize) -> Vec<f64> {
    (0..m)
        .map(|d| if d == 0 { 0.0 } else { (4.0 * (PI * d as f64 / m as f64).sin().powi(2)).ln() })
        .collect()
}

/// Cardinal function of trigonometric interpolation on N equispaced nodes
/// (N even), L(s) = sin(Ns/2) cot(s/2) / N, and its derivative.
fn cardinal(n: usize, s: f64) -> (f64, f64) {
    let nf = n as f64;
    let half = 0.5 * s;
    let sh = half.sin();
    if sh.abs() < 1e-15 {
        return (1.0, 0.0);
    }
    let cot = half.cos() / sh;
    let (sn, cn) = (0.5 * nf * s).sin_cos();
    let l = sn * cot / nf;
    let dl = (0.5 * nf * cn * cot - sn / (2.0 * sh * sh)) / nf;
    (l, dl)
}

/// Interpolation from N coarse nodes to q·N fine nodes, and the derivative
/// of the interpolant at the fine nodes (both (qN)×N).
pub(crate) fn interpolation(n: usize, q: usize) -> (Mat<C64>, Mat<C64>) {
    let m = n * q;
    let mut table = vec![(0.0, 0.0); m];
    for (e, slot) in table.iter_mut().enumerate() {
        if e % q == 0 {
            // Fine node coincides with a coarse node: the interpolant is a
            // Kronecker delta there, with derivative ½(−1)^j cot(s/2).
            let j = e / q;
            if j == 0 {
                *slot = (1.0, 0.0);
            } else {
                let s = 2.0 * PI * j as f64 / n as f64;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                *slot = (0.0, 0.5 * sign / (0.5 * s).tan());
            }
        } else {
            *slot = cardinal(n, 2.0 * PI * e as f64 / m as f64);
        }
    }
    let u = Mat::from_fn(m, n, |l, j| C64::new(table[(l + m - q * j) % m].0, 0.0));
    let du = Mat::from_fn(m, n, |l, j| C64::new(table[(l + m - q * j) % m].1, 0.0));
    (u, du)
}

/// Entry (j, l) of the N×N Fourier differentiation matrix (N even).
pub(crate) fn differentiation_entry(n: usize, j: usize, l: usize) -> f64 {
    if j == l {
        return 0.0;
    }
    let d = (j + n - l) % n;
    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
    0.5 * sign / (PI * d as f64 / n as f64).tan()
}

pub(crate) fn differentiation(n: usize) -> Mat<C64> {
    Mat::from_fn(n, n, |j, l| C64::new(differentiation_entry(n, j, l), 0.0))
}
