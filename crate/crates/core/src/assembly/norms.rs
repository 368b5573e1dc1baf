//! Discrete L²(Γ), H¹_k(Γ) and (on the circle) fractional H^s_k(Γ) norms.

use std::f64::consts::PI;

use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use super::quadrature;
use super::{BoundaryFunction, DiscreteOperator, SpaceTag};
use crate::error::{Error, Result};
use crate::geom::BoundaryGrid;

/// W^{1/2} A W^{−1/2}: the matrix whose spectral norm is the discrete
/// L²(Γ)→L²(Γ) norm of A.
pub fn weighted_matrix(a: &DiscreteOperator) -> Mat<C64> {
    let w = &a.grid.weights;
    let n = a.n();
    Mat::from_fn(n, n, |i, j| a.matrix[(i, j)] * (w[i] / w[j]).sqrt())
}

pub(crate) fn spectral_norm(m: &Mat<C64>) -> Result<f64> {
    let s = m.singular_values().map_err(|e| Error::Decomposition(format!("SVD: {e:?}")))?;
    Ok(s.first().copied().unwrap_or(0.0))
}

/// Largest singular value of W^{1/2}·A·W^{−1/2}.
pub fn l2_operator_norm(a: &DiscreteOperator) -> Result<f64> {
    if a.source_space != SpaceTag::L2 || a.target_space != SpaceTag::L2 {
        return Err(Error::UnsupportedSpace(format!(
            "L² norm requested for {:?}→{:?} operator",
            a.source_space, a.target_space
        )));
    }
    spectral_norm(&weighted_matrix(a))
}

/// DFT index → signed frequency in [−N/2, N/2).
pub(crate) fn frequency(idx: usize, n: usize) -> f64 {
    if idx < n / 2 {
        idx as f64
    } else {
        idx as f64 - n as f64
    }
}

/// Unitary DFT matrix F[m, j] = e^{−i m t_j}/√N.
fn unitary_dft(n: usize) -> Mat<C64> {
    let scale = 1.0 / (n as f64).sqrt();
    Mat::from_fn(n, n, |m, j| {
        let phase = -2.0 * PI * ((m * j) % n) as f64 / n as f64;
        C64::from_polar(scale, phase)
    })
}

/// Fourier multiplier (m²/a² + k²)^{s/2} of H^s_k on a circle of radius a.
fn multiplier(m: f64, radius: f64, k: f64, s: f64) -> f64 {
    ((m / radius).powi(2) + k * k).powf(0.5 * s)
}

/// ‖f‖ in H^s_k(Γ).
///
/// On a centred circle the Fourier definition 2πa Σ (m²/a² + k²)^s |f̂_m|² is
/// used for every s ∈ [−1, 1]; on other curves s ∈ {0, 1} with
/// ‖f‖²_{H¹_k} = ‖∇_Γ f‖² + k²‖f‖² and ∇_Γ computed spectrally.
pub fn sobolev_norm(f: &BoundaryFunction, s: f64, k: f64) -> Result<f64> {
    let grid = &f.grid;
    if let Some(radius) = grid.curve.origin_circle_radius() {
        if !(-1.0..=1.0).contains(&s) {
            return Err(Error::UnsupportedSpace(format!("Sobolev index {s} outside [−1, 1]")));
        }
        let n = grid.n;
        let mut acc = 0.0;
        for m in 0..n {
            let mut c = C64::new(0.0, 0.0);
            for (j, v) in f.values.iter().enumerate() {
                let phase = -2.0 * PI * ((m * j) % n) as f64 / n as f64;
                c += v * C64::from_polar(1.0, phase);
            }
            c /= n as f64;
            acc += multiplier(frequency(m, n), radius, k, 2.0 * s) * c.norm_sqr();
        }
        return Ok((2.0 * PI * radius * acc).sqrt());
    }
    let l2sq: f64 = f.values.iter().zip(&grid.weights).map(|(v, w)| w * v.norm_sqr()).sum();
    if s == 0.0 {
        return Ok(l2sq.sqrt());
    }
    if s == 1.0 {
        let n = grid.n;
        let mut grad = 0.0;
        for i in 0..n {
            let mut d = C64::new(0.0, 0.0);
            for (j, v) in f.values.iter().enumerate() {
                d += quadrature::differentiation_entry(n, i, j) * v;
            }
            grad += grid.weights[i] * d.norm_sqr() / grid.speeds[i].powi(2);
        }
        return Ok((grad + k * k * l2sq).sqrt());
    }
    Err(Error::UnsupportedSpace(format!("H^{s}_k is only available on a centred circle")))
}

/// Gram matrix of the discrete H¹_k inner product, Dᴴ diag(w/|x'|²) D + k² W.
fn h1_gram(grid: &BoundaryGrid, k: f64) -> Mat<C64> {
    let n = grid.n;
    let d = quadrature::differentiation(n);
    let wd = Mat::from_fn(n, n, |i, j| d[(i, j)] * (grid.weights[i] / grid.speeds[i].powi(2)));
    let mut g = d.adjoint() * &wd;
    for i in 0..n {
        g[(i, i)] += k * k * grid.weights[i];
    }
    g
}

/// Factor T with ‖f‖_space = ‖T f‖₂ on a general curve (L² or H¹_k).
fn general_factor(grid: &BoundaryGrid, tag: SpaceTag, k: f64) -> Result<Mat<C64>> {
    let n = grid.n;
    match tag {
        SpaceTag::L2 => Ok(Mat::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(grid.weights[i].sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })),
        SpaceTag::H1k => {
            let g = h1_gram(grid, k);
            let llt = g.llt(Side::Lower).map_err(|e| Error::Decomposition(format!("Cholesky: {e:?}")))?;
            Ok(llt.L().adjoint().to_owned())
        }
        other => Err(Error::UnsupportedSpace(format!("{other:?} requires a centred circle"))),
    }
}

/// ‖A‖ from space `from` to space `to`: σ_max(T_to A T_from^{−1}).
pub fn graded_operator_norm(a: &DiscreteOperator, from: SpaceTag, to: SpaceTag, k: f64) -> Result<f64> {
    let grid = &a.grid;
    let n = a.n();
    if let Some(radius) = grid.curve.origin_circle_radius() {
        let f = unitary_dft(n);
        let ahat = &(&f * &a.matrix) * f.adjoint();
        let (sf, st) = (from.exponent(), to.exponent());
        let m = Mat::from_fn(n, n, |i, j| {
            ahat[(i, j)] * multiplier(frequency(i, n), radius, k, st) / multiplier(frequency(j, n), radius, k, sf)
        });
        return spectral_norm(&m);
    }
    let t_to = general_factor(grid, to, k)?;
    let t_from = general_factor(grid, from, k)?;
    let t_from_inv = t_from.partial_piv_lu().inverse();
    spectral_norm(&(&(&t_to * &a.matrix) * &t_from_inv))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geom::{boundary_grid, make_curve};

    fn circle(n: usize) -> Arc<BoundaryGrid> {
        Arc::new(boundary_grid(&make_curve("circle", &[1.0]).unwrap(), n).unwrap())
    }

    #[test]
    fn identity_and_diagonal_norms() {
        let g = Arc::new(boundary_grid(&make_curve("kite", &[]).unwrap(), 32).unwrap());
        let id = DiscreteOperator::identity(g.clone());
        assert!((l2_operator_norm(&id).unwrap() - 1.0).abs() < 1e-13);
        let three = DiscreteOperator::diagonal(g.clone(), &vec![C64::new(3.0, 0.0); 32]).unwrap();
        assert!((l2_operator_norm(&three).unwrap() - 3.0).abs() < 1e-13);
        for tag in [SpaceTag::L2, SpaceTag::H1k] {
            assert!((graded_operator_norm(&id, tag, tag, 4.0).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn circle_sobolev_norms_of_modes() {
        let g = circle(64);
        let k = 3.0;
        for n in [0i32, 1, 5, -7] {
            let f = BoundaryFunction::from_fn(g.clone(), |t, _| C64::from_polar(1.0, n as f64 * t));
            let base = (2.0 * PI).sqrt();
            let nf = n as f64;
            assert!((sobolev_norm(&f, 0.0, k).unwrap() - base).abs() < 1e-12);
            assert!((sobolev_norm(&f, 1.0, k).unwrap() - base * (nf * nf + k * k).sqrt()).abs() < 1e-11);
            assert!((sobolev_norm(&f, 0.5, k).unwrap() - base * (nf * nf + k * k).powf(0.25)).abs() < 1e-11);
        }
    }

    #[test]
    fn general_h1_matches_analytic_gradient() {
        // On an ellipse, f = x₁ has tangential derivative x₁'/|x'|.
        let g = Arc::new(boundary_grid(&make_curve("ellipse", &[2.0, 1.0]).unwrap(), 128).unwrap());
        let f = BoundaryFunction::from_fn(g.clone(), |_, x| C64::new(x[0], 0.0));
        let k = 2.0;
        let mut expect = 0.0;
        for j in 0..g.n {
            let d = g.derivatives[j];
            expect += g.weights[j] * ((d[0] / g.speeds[j]).powi(2) + k * k * g.points[j][0].powi(2));
        }
        assert!((sobolev_norm(&f, 1.0, k).unwrap() - expect.sqrt()).abs() < 1e-10);
        assert!(matches!(sobolev_norm(&f, 0.5, k), Err(Error::UnsupportedSpace(_))));
    }

    #[test]
    fn multiplier_cancels_in_graded_norm() {
        let n = 32;
        let g = circle(n);
        let k = 5.0;
        // Operator acting on mode m by sqrt(m² + k²), built in the Fourier basis.
        let f = unitary_dft(n);
        let lam = Mat::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(multiplier(frequency(i, n), 1.0, k, 1.0), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let a = &(f.adjoint() * &lam) * &f;
        let op = DiscreteOperator::l2(a, g);
        let v = graded_operator_norm(&op, SpaceTag::H1k, SpaceTag::L2, k).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }
}
