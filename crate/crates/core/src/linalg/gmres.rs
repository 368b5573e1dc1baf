use faer::Mat;
use num_complex::Complex64 as C64;

use crate::assembly::{BoundaryFunction, DiscreteOperator};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITERATIONS: usize = 2000;

/// Outcome of an unrestarted GMRES run (x₀ = 0).
#[derive(Debug, Clone)]
pub struct GmresReport {
    pub solution: Vec<C64>,
    pub iterations: usize,
    pub final_relative_residual: f64,
    pub converged: bool,
    /// Relative residual after each iteration (entry 0 is the initial 1.0).
    pub residual_history: Vec<f64>,
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn matvec(a: &Mat<C64>, x: &[C64]) -> Vec<C64> {
    let n = a.nrows();
    let mut y = vec![C64::new(0.0, 0.0); n];
    for (j, &xj) in x.iter().enumerate() {
        let col = a.col(j);
        for i in 0..n {
            y[i] += col[i] * xj;
        }
    }
    y
}

/// Full-orthogonalisation GMRES with modified Gram–Schmidt Arnoldi and
/// Givens rotations; the iteration count is the Krylov dimension reached.
pub fn gmres_matrix(a: &Mat<C64>, b: &[C64], tol: f64, max_iterations: usize) -> Result<GmresReport> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.ncols() });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} outside (0, 1e-2]")));
    }
    let beta = norm(b);
    let zero = C64::new(0.0, 0.0);
    if beta == 0.0 {
        return Ok(GmresReport {
            solution: vec![zero; n],
            iterations: 0,
            final_relative_residual: 0.0,
            converged: true,
            residual_history: vec![0.0],
        });
    }
    let max_it = max_iterations.min(n);
    let mut basis: Vec<Vec<C64>> = vec![b.iter().map(|v| v / beta).collect()];
    // Columns of the (rotated) Hessenberg matrix.
    let mut hcols: Vec<Vec<C64>> = Vec::new();
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<C64> = Vec::new();
    let mut g = vec![C64::new(beta, 0.0)];
    let mut history = vec![1.0];
    let mut residual = 1.0;
    let mut iterations = 0;
    while iterations < max_it {
        let j = iterations;
        let mut w = matvec(a, &basis[j]);
        let mut h = vec![zero; j + 2];
        for (i, v) in basis.iter().enumerate() {
            let hij: C64 = v.iter().zip(&w).map(|(vi, wi)| vi.conj() * wi).sum();
            for (wk, vk) in w.iter_mut().zip(v) {
                *wk -= hij * vk;
            }
            h[i] = hij;
        }
        let hnext = norm(&w);
        h[j + 1] = C64::new(hnext, 0.0);
        for i in 0..j {
            let t = cs[i] * h[i] + sn[i] * h[i + 1];
            h[i + 1] = -sn[i].conj() * h[i] + cs[i] * h[i + 1];
            h[i] = t;
        }
        // New rotation annihilating h[j+1].
        let (a0, b0) = (h[j], h[j + 1]);
        let r = (a0.norm_sqr() + b0.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (1.0, zero)
        } else if a0.norm() == 0.0 {
            (0.0, b0.conj() / b0.norm())
        } else {
            let c = a0.norm() / r;
            (c, (a0 / a0.norm()) * b0.conj() / r)
        };
        h[j] = c * a0 + s * b0;
        h[j + 1] = zero;
        cs.push(c);
        sn.push(s);
        let gj = g[j];
        g[j] = c * gj;
        g.push(-s.conj() * gj);
        hcols.push(h);
        iterations += 1;
        residual = g[j + 1].norm() / beta;
        history.push(residual);
        if residual <= tol || hnext <= 1e-14 * beta {
            break;
        }
        basis.push(w.iter().map(|v| v / hnext).collect());
    }
    // Back substitution for the Krylov coefficients.
    let m = iterations;
    let mut y = vec![zero; m];
    for i in (0..m).rev() {
        let mut acc = g[i];
        for k in i + 1..m {
            acc -= hcols[k][i] * y[k];
        }
        y[i] = acc / hcols[i][i];
    }
    let mut x = vec![zero; n];
    for (k, yk) in y.iter().enumerate() {
        for (xi, vi) in x.iter_mut().zip(&basis[k]) {
            *xi += yk * vi;
        }
    }
    // Report the true residual of the returned iterate.
    let ax = matvec(a, &x);
    let true_res = norm(&ax.iter().zip(b).map(|(u, v)| u - v).collect::<Vec<_>>()) / beta;
    let final_relative_residual = true_res.max(residual.min(true_res));
    Ok(GmresReport {
        solution: x,
        iterations,
        converged: final_relative_residual <= tol,
        final_relative_residual,
        residual_history: history,
    })
}

/// GMRES on a discrete operator in the Euclidean inner product of the
/// Nyström system.
pub fn gmres(a: &DiscreteOperator, b: &BoundaryFunction, tol: f64, max_iterations: usize) -> Result<GmresReport> {
    gmres_matrix(&a.matrix, &b.values, tol, max_iterations)
}
