use std::f64::consts::PI;

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::assembly::{weighted_matrix, BoundaryFunction, DiscreteOperator, SpaceTag};
use crate::error::{Error, Result};

/// LU pivots below this fraction of max |a_ij| count as singular.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-14;
pub const DEFAULT_THETA_SAMPLES: usize = 720;

fn max_abs(a: &Mat<C64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

fn check_square(a: &Mat<C64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
    }
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let v = a[(i, j)];
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite(format!("matrix entry ({i}, {j})")));
            }
        }
    }
    Ok(())
}

fn lu_checked(a: &Mat<C64>) -> Result<faer::linalg::solvers::PartialPivLu<C64>> {
    check_square(a)?;
    let scale = max_abs(a);
    if scale == 0.0 {
        return Err(Error::Singular(0.0));
    }
    let lu = a.partial_piv_lu();
    let u = lu.U();
    let mut min_pivot = f64::INFINITY;
    for i in 0..u.nrows() {
        min_pivot = min_pivot.min(u[(i, i)].norm());
    }
    if min_pivot < SINGULAR_PIVOT_RATIO * scale {
        return Err(Error::Singular(min_pivot / scale));
    }
    Ok(lu)
}

/// Solves A x = b by LU with partial pivoting.
pub fn solve_matrix(a: &Mat<C64>, b: &[C64]) -> Result<Vec<C64>> {
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: b.len() });
    }
    let lu = lu_checked(a)?;
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = lu.solve(&rhs);
    Ok((0..b.len()).map(|i| x[(i, 0)]).collect())
}

pub fn solve_dense(a: &DiscreteOperator, b: &BoundaryFunction) -> Result<BoundaryFunction> {
    let x = solve_matrix(&a.matrix, &b.values)?;
    BoundaryFunction::new(a.grid.clone(), x)
}

pub fn inverse_matrix(a: &Mat<C64>) -> Result<Mat<C64>> {
    Ok(lu_checked(a)?.inverse())
}

/// A⁻¹ with source and target spaces exchanged.
pub fn inverse(a: &DiscreteOperator) -> Result<DiscreteOperator> {
    Ok(DiscreteOperator {
        matrix: inverse_matrix(&a.matrix)?,
        grid: a.grid.clone(),
        source_space: a.target_space,
        target_space: a.source_space,
    })
}

/// σ_max/σ_min of a plain matrix (+∞ when σ_min = 0).
pub fn condition_number_matrix(a: &Mat<C64>) -> Result<f64> {
    check_square(a)?;
    let s = a.singular_values().map_err(|e| Error::Decomposition(format!("SVD: {e:?}")))?;
    let (max, min) = (s[0], s[s.len() - 1]);
    if min == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(max / min)
}

fn require_l2(a: &DiscreteOperator) -> Result<()> {
    if a.source_space != SpaceTag::L2 || a.target_space != SpaceTag::L2 {
        return Err(Error::UnsupportedSpace(format!("{:?}→{:?} operator, expected L²→L²", a.source_space, a.target_space)));
    }
    Ok(())
}

/// Discrete L²(Γ) condition number ‖A‖‖A⁻¹‖.
pub fn condition_number(a: &DiscreteOperator) -> Result<f64> {
    require_l2(a)?;
    condition_number_matrix(&weighted_matrix(a))
}

/// max over θ of λ_min of the Hermitian part of e^{iθ}A.
///
/// A positive value is the distance from 0 to the numerical range (up to
/// the angular resolution); a value ≤ 0 means 0 lies in the numerical range.
pub fn coercivity_constant_matrix(a: &Mat<C64>, theta_samples: usize) -> Result<f64> {
    check_square(a)?;
    if theta_samples < 360 {
        return Err(Error::InvalidParameter(format!("theta_samples {theta_samples} < 360")));
    }
    let n = a.nrows();
    let mut best = f64::NEG_INFINITY;
    for s in 0..theta_samples {
        let theta = 2.0 * PI * s as f64 / theta_samples as f64;
        let e = C64::from_polar(1.0, theta);
        let herm = Mat::from_fn(n, n, |i, j| (e * a[(i, j)] + (e * a[(j, i)]).conj()) * 0.5);
        let eig = herm
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|err| Error::Decomposition(format!("eigensolver: {err:?}")))?;
        best = best.max(eig[0]);
    }
    Ok(best)
}

/// Coercivity estimate of an L²→L² operator in the weighted inner product.
pub fn coercivity_constant(a: &DiscreteOperator, theta_samples: usize) -> Result<f64> {
    require_l2(a)?;
    coercivity_constant_matrix(&weighted_matrix(a), theta_samples)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geom::{boundary_grid, make_curve};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn trivial_solves() {
        let g = Arc::new(boundary_grid(&make_curve("circle", &[1.0]).unwrap(), 16).unwrap());
        let b = BoundaryFunction::from_fn(g.clone(), |t, _| c(t.cos(), t));
        let x = solve_dense(&DiscreteOperator::identity(g.clone()), &b).unwrap();
        assert!(x.max_abs_diff(&b) < 1e-15);
        let two = DiscreteOperator::diagonal(g.clone(), &vec![c(2.0, 0.0); 16]).unwrap();
        let x = solve_dense(&two, &b).unwrap();
        for j in 0..16 {
            assert!((x.values[j] - b.values[j] / 2.0).norm() < 1e-15);
        }
    }

    #[test]
    fn singular_matrix_reported() {
        let a = Mat::from_fn(3, 3, |i, j| c((i + j) as f64, 0.0));
        assert!(matches!(solve_matrix(&a, &[c(1.0, 0.0); 3]), Err(Error::Singular(_))));
    }

    #[test]
    fn condition_numbers() {
        let id = Mat::<C64>::identity(4, 4);
        assert!((condition_number_matrix(&id).unwrap() - 1.0).abs() < 1e-14);
        let d = Mat::from_fn(2, 2, |i, j| if i == j { c(if i == 0 { 1.0 } else { 10.0 }, 0.0) } else { c(0.0, 0.0) });
        assert!((condition_number_matrix(&d).unwrap() - 10.0).abs() < 1e-13);
        let z = Mat::<C64>::zeros(2, 2);
        assert!(condition_number_matrix(&z).unwrap().is_infinite());
    }

    #[test]
    fn coercivity_examples() {
        let id = Mat::<C64>::identity(3, 3);
        assert!((coercivity_constant_matrix(&id, 720).unwrap() - 1.0).abs() < 1e-14);
        // Field of values of [[1,2],[0,1]] is the closed unit disk about 1.
        let j = Mat::from_fn(2, 2, |i, k| match (i, k) {
            (0, 0) | (1, 1) => c(1.0, 0.0),
            (0, 1) => c(2.0, 0.0),
            _ => c(0.0, 0.0),
        });
        assert!(coercivity_constant_matrix(&j, 720).unwrap() <= 1e-6);
        // Normal matrix with eigenvalues 2 and 2i: distance from 0 to the segment is √2.
        let n = Mat::from_fn(2, 2, |i, k| if i == k { if i == 0 { c(2.0, 0.0) } else { c(0.0, 2.0) } } else { c(0.0, 0.0) });
        assert!((coercivity_constant_matrix(&n, 720).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!(coercivity_constant_matrix(&n, 100).is_err());
    }
}
