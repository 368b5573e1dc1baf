//! Nyström discretisation of the single-layer, double-layer, adjoint
//! double-layer and hypersingular operators on a closed analytic curve.
//!
//! Logarithmic kernel singularities are split off and integrated with the
//! exact trigonometric product rule.  The quadrature runs on a grid `q`
//! times finer than the collocation grid, densities being carried there by
//! trigonometric interpolation; this removes the aliasing of near-Nyquist
//! modes that the plain product rule suffers from, so that operator
//! identities hold to near machine precision on every mode the grid can
//! represent.  `q = 1` recovers the classical scheme.  The hypersingular
//! operator uses the Maue form H = d/ds S d/ds + k² n·S n.

mod norms;
pub(crate) mod quadrature;

use std::f64::consts::PI;
use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{BoundaryGrid, Curve, Point};
use crate::specfun::kernel;

pub use norms::{graded_operator_norm, l2_operator_norm, sobolev_norm, weighted_matrix};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Function space attached to the domain or range of a discrete operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceTag {
    L2,
    H1k,
    HhalfK,
    HminushalfK,
}

impl SpaceTag {
    /// Sobolev exponent s of H^s_k.
    pub fn exponent(self) -> f64 {
        match self {
            SpaceTag::L2 => 0.0,
            SpaceTag::H1k => 1.0,
            SpaceTag::HhalfK => 0.5,
            SpaceTag::HminushalfK => -0.5,
        }
    }

    pub fn is_fractional(self) -> bool {
        matches!(self, SpaceTag::HhalfK | SpaceTag::HminushalfK)
    }
}

/// Grid samples of a boundary density.
#[derive(Debug, Clone)]
pub struct BoundaryFunction {
    pub values: Vec<C64>,
    pub grid: Arc<BoundaryGrid>,
}

impl BoundaryFunction {
    pub fn new(grid: Arc<BoundaryGrid>, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::DimensionMismatch { expected: grid.n, found: values.len() });
        }
        Ok(Self { values, grid })
    }

    /// Samples `f(t_j, x_j)` at every node.
    pub fn from_fn(grid: Arc<BoundaryGrid>, f: impl Fn(f64, Point) -> C64) -> Self {
        let values = grid.nodes.iter().zip(&grid.points).map(|(&t, &x)| f(t, x)).collect();
        Self { values, grid }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest nodal difference to another function on the same grid.
    pub fn max_abs_diff(&self, other: &BoundaryFunction) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

/// Dense complex matrix acting on grid samples, tagged with function spaces.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub matrix: Mat<C64>,
    pub grid: Arc<BoundaryGrid>,
    pub source_space: SpaceTag,
    pub target_space: SpaceTag,
}

fn check_space(grid: &BoundaryGrid, tag: SpaceTag) -> Result<()> {
    if tag.is_fractional() && grid.curve.origin_circle_radius().is_none() {
        return Err(Error::UnsupportedSpace(format!("{tag:?} is only defined on a centred circle")));
    }
    Ok(())
}

impl DiscreteOperator {
    pub fn new(matrix: Mat<C64>, grid: Arc<BoundaryGrid>, source_space: SpaceTag, target_space: SpaceTag) -> Result<Self> {
        if matrix.nrows() != grid.n || matrix.ncols() != grid.n {
            return Err(Error::DimensionMismatch { expected: grid.n, found: matrix.nrows().max(matrix.ncols()) });
        }
        check_space(&grid, source_space)?;
        check_space(&grid, target_space)?;
        for j in 0..matrix.ncols() {
            for i in 0..matrix.nrows() {
                let v = matrix[(i, j)];
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NonFinite(format!("operator entry ({i}, {j})")));
                }
            }
        }
        Ok(Self { matrix, grid, source_space, target_space })
    }

    /// L²→L² operator without the finiteness scan (internal constructions).
    pub(crate) fn l2(matrix: Mat<C64>, grid: Arc<BoundaryGrid>) -> Self {
        Self { matrix, grid, source_space: SpaceTag::L2, target_space: SpaceTag::L2 }
    }

    pub fn identity(grid: Arc<BoundaryGrid>) -> Self {
        let n = grid.n;
        Self::l2(Mat::identity(n, n), grid)
    }

    pub fn diagonal(grid: Arc<BoundaryGrid>, values: &[C64]) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::DimensionMismatch { expected: grid.n, found: values.len() });
        }
        let n = grid.n;
        Ok(Self::l2(Mat::from_fn(n, n, |i, j| if i == j { values[i] } else { C64::new(0.0, 0.0) }), grid))
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    /// Same matrix with different space tags.
    pub fn with_spaces(mut self, source: SpaceTag, target: SpaceTag) -> Result<Self> {
        check_space(&self.grid, source)?;
        check_space(&self.grid, target)?;
        self.source_space = source;
        self.target_space = target;
        Ok(self)
    }

    fn same_grid(&self, other: &DiscreteOperator) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::InvalidParameter("operators live on different grids".into()))
        }
    }

    pub fn apply(&self, f: &BoundaryFunction) -> Result<BoundaryFunction> {
        if f.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: f.len() });
        }
        let n = self.n();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            let fj = f.values[j];
            if fj == C64::new(0.0, 0.0) {
                continue;
            }
            let col = self.matrix.col(j);
            for i in 0..n {
                out[i] += col[i] * fj;
            }
        }
        Ok(BoundaryFunction { values: out, grid: self.grid.clone() })
    }

    /// self ∘ other.
    pub fn compose(&self, other: &DiscreteOperator) -> Result<DiscreteOperator> {
        self.same_grid(other)?;
        Ok(DiscreteOperator {
            matrix: &self.matrix * &other.matrix,
            grid: self.grid.clone(),
            source_space: other.source_space,
            target_space: self.target_space,
        })
    }

    /// a·self + b·other (space tags taken from `self`).
    pub fn combine(&self, a: C64, other: &DiscreteOperator, b: C64) -> Result<DiscreteOperator> {
        self.same_grid(other)?;
        let n = self.n();
        let m = Mat::from_fn(n, n, |i, j| a * self.matrix[(i, j)] + b * other.matrix[(i, j)]);
        Ok(DiscreteOperator { matrix: m, grid: self.grid.clone(), ..*self })
    }

    /// Left multiplication by diag(d).
    pub fn scale_rows(&self, d: &[C64]) -> Result<DiscreteOperator> {
        if d.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: d.len() });
        }
        let n = self.n();
        let m = Mat::from_fn(n, n, |i, j| d[i] * self.matrix[(i, j)]);
        Ok(DiscreteOperator { matrix: m, grid: self.grid.clone(), ..*self })
    }

    /// self + c·I.
    pub fn shift(&self, c: C64) -> DiscreteOperator {
        let mut m = self.matrix.clone();
        for i in 0..self.n() {
            m[(i, i)] += c;
        }
        DiscreteOperator { matrix: m, grid: self.grid.clone(), ..*self }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.matrix.ncols() {
            for i in 0..self.matrix.nrows() {
                best = best.max(self.matrix[(i, j)].norm());
            }
        }
        best
    }

    pub fn is_finite(&self) -> bool {
        (0..self.matrix.ncols())
            .all(|j| (0..self.matrix.nrows()).all(|i| self.matrix[(i, j)].re.is_finite() && self.matrix[(i, j)].im.is_finite()))
    }
}

/// Discretisation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    /// Ratio of quadrature nodes to collocation nodes (≥ 1).
    pub oversampling: usize,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self { oversampling: 2 }
    }
}

/// S_k, D_k, D'_k and H_k on one grid.
#[derive(Debug, Clone)]
pub struct LayerOperators {
    pub k: f64,
    pub s: DiscreteOperator,
    pub d: DiscreteOperator,
    pub dadj: DiscreteOperator,
    pub h: DiscreteOperator,
}

/// Curve data at the quadrature nodes.
struct FineGrid {
    m: usize,
    points: Vec<Point>,
    d1: Vec<Point>,
    d2: Vec<Point>,
    normals: Vec<Point>,
    speeds: Vec<f64>,
    log_w: Vec<f64>,
    log_t: Vec<f64>,
}

impl FineGrid {
    fn new(curve: &Curve, n: usize, q: usize) -> Self {
        let m = n * q;
        let h = 2.0 * PI / m as f64;
        let ts: Vec<f64> = (0..m).map(|l| h * l as f64).collect();
        let points: Vec<Point> = ts.iter().map(|&t| curve.point(t)).collect();
        let d1: Vec<Point> = ts.iter().map(|&t| curve.derivative(t)).collect();
        let d2: Vec<Point> = ts.iter().map(|&t| curve.second_derivative(t)).collect();
        let speeds: Vec<f64> = d1.iter().map(|d| d[0].hypot(d[1])).collect();
        let normals = d1.iter().zip(&speeds).map(|(d, s)| [d[1] / s, -d[0] / s]).collect();
        Self { m, points, d1, d2, normals, speeds, log_w: quadrature::log_weights(m), log_t: quadrature::log_table(m) }
    }

    fn h(&self) -> f64 {
        2.0 * PI / self.m as f64
    }

    /// Curvature term (x₁''x₂' − x₂''x₁')/(4π|x'|²): diagonal limit of the
    /// double-layer kernels (including the speed factor).
    fn dl_diagonal(&self, a: usize) -> f64 {
        let (d, dd) = (self.d1[a], self.d2[a]);
        (dd[0] * d[1] - dd[1] * d[0]) / (4.0 * PI * self.speeds[a].powi(2))
    }
}

fn check_options(grid: &BoundaryGrid, opts: &AssemblyOptions) -> Result<()> {
    if opts.oversampling == 0 || opts.oversampling > 8 {
        return Err(Error::InvalidParameter(format!("oversampling {} outside 1..=8", opts.oversampling)));
    }
    if grid.n % 2 != 0 {
        return Err(Error::InvalidParameter("grid size must be even".into()));
    }
    Ok(())
}

fn to_mat(rows: usize, cols: usize, buf: &[C64]) -> Mat<C64> {
    Mat::from_fn(rows, cols, |i, j| buf[i * cols + j])
}

fn ensure_finite(buf: &[C64], what: &str) -> Result<()> {
    if buf.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Assembles S_k, D_k, D'_k and H_k with default options.
pub fn assemble_layer_operators(k: f64, grid: &BoundaryGrid) -> Result<LayerOperators> {
    assemble_layer_operators_with(k, grid, &AssemblyOptions::default())
}

pub fn assemble_layer_operators_with(k: f64, grid: &BoundaryGrid, opts: &AssemblyOptions) -> Result<LayerOperators> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!("wavenumber {k} must be positive")));
    }
    check_options(grid, opts)?;
    let n = grid.n;
    let q = opts.oversampling;
    let fine = FineGrid::new(&grid.curve, n, q);
    let m = fine.m;
    let h = fine.h();
    let quarter_i = C64::new(0.0, 0.25);

    // Fine-target single layer without source speed, for the Maue form.
    let mut s_fine = vec![C64::new(0.0, 0.0); m * m];
    // Coarse-target rows of S, D, D' and the normal-weighted S.
    let mut rows_s = vec![C64::new(0.0, 0.0); n * m];
    let mut rows_d = vec![C64::new(0.0, 0.0); n * m];
    let mut rows_da = vec![C64::new(0.0, 0.0); n * m];
    let mut rows_n = vec![C64::new(0.0, 0.0); n * m];

    s_fine.par_chunks_mut(m).enumerate().for_each(|(a, row)| {
        let x = fine.points[a];
        let sa = fine.speeds[a];
        for l in 0..m {
            let d = (l + m - a) % m;
            let w = fine.log_w[d];
            if l == a {
                let m1 = -1.0 / (4.0 * PI);
                let m2 = quarter_i - EULER_GAMMA / (2.0 * PI) - (k * sa / 2.0).ln() / (2.0 * PI);
                row[l] = w * m1 + h * m2;
                continue;
            }
            let y = fine.points[l];
            let r = (x[0] - y[0]).hypot(x[1] - y[1]);
            let [j0, _, y0, _] = kernel::bessel01(k * r);
            let m1 = -j0 / (4.0 * PI);
            let phi = quarter_i * C64::new(j0, y0);
            let m2 = phi - m1 * fine.log_t[d];
            row[l] = w * m1 + h * m2;
        }
    });

    let coarse_rows = rows_s
        .par_chunks_mut(m)
        .zip(rows_d.par_chunks_mut(m))
        .zip(rows_da.par_chunks_mut(m))
        .zip(rows_n.par_chunks_mut(m));
    coarse_rows.enumerate().for_each(|(i, (((rs, rd), rda), rn))| {
        let a = q * i;
        let x = fine.points[a];
        let nx = fine.normals[a];
        let diag_dl = fine.dl_diagonal(a);
        for l in 0..m {
            let sl = fine.speeds[l];
            let ny = fine.normals[l];
            let s_entry = s_fine[a * m + l] * sl;
            rs[l] = s_entry;
            rn[l] = s_entry * (nx[0] * ny[0] + nx[1] * ny[1]);
            if l == a {
                rd[l] = C64::new(h * diag_dl, 0.0);
                rda[l] = C64::new(h * diag_dl, 0.0);
                continue;
            }
            let d = (l + m - a) % m;
            let w = fine.log_w[d];
            let lg = fine.log_t[d];
            let y = fine.points[l];
            let dx = [x[0] - y[0], x[1] - y[1]];
            let r = dx[0].hypot(dx[1]);
            let [_, j1, _, y1] = kernel::bessel01(k * r);
            // (ik/4) H_1(kr) with H_1 = J_1 + iY_1.
            let h1 = C64::new(-0.25 * k * y1, 0.25 * k * j1);
            let log_coef = -k * j1 / (4.0 * PI);
            let c = (ny[0] * dx[0] + ny[1] * dx[1]) / r * sl;
            let m1 = log_coef * c;
            rd[l] = w * m1 + h * (h1 * c - m1 * lg);
            let ca = -(nx[0] * dx[0] + nx[1] * dx[1]) / r * sl;
            let m1a = log_coef * ca;
            rda[l] = w * m1a + h * (h1 * ca - m1a * lg);
        }
    });
    ensure_finite(&s_fine, "single-layer assembly")?;
    ensure_finite(&rows_d, "double-layer assembly")?;
    ensure_finite(&rows_da, "adjoint double-layer assembly")?;

    let (u, du) = quadrature::interpolation(n, q);
    let s_rows = to_mat(n, m, &rows_s);
    let s = &s_rows * &u;
    let d = &to_mat(n, m, &rows_d) * &u;
    let dadj = &to_mat(n, m, &rows_da) * &u;
    let nrm = &to_mat(n, m, &rows_n) * &u;

    // H = (1/|x'|) E·∂_t · S̃ · ∂_τ(U·) + k² n·S n
    let s_fine = to_mat(m, m, &s_fine);
    let inner = &s_fine * &du;
    let dt_rows = Mat::from_fn(n, m, |i, l| C64::new(quadrature::differentiation_entry(m, q * i, l), 0.0));
    let tang = &dt_rows * &inner;
    let hmat = Mat::from_fn(n, n, |i, j| tang[(i, j)] / grid.speeds[i] + k * k * nrm[(i, j)]);

    let g = Arc::new(grid.clone());
    let op = |mat: Mat<C64>| DiscreteOperator::l2(mat, g.clone());
    let h_op = DiscreteOperator { matrix: hmat, grid: g.clone(), source_space: SpaceTag::H1k, target_space: SpaceTag::L2 };
    let out = LayerOperators { k, s: op(s), d: op(d), dadj: op(dadj), h: h_op };
    for (name, o) in [("S", &out.s), ("D", &out.d), ("D'", &out.dadj), ("H", &out.h)] {
        if !o.is_finite() {
            return Err(Error::NonFinite(format!("{name} matrix")));
        }
    }
    Ok(out)
}

/// Which single-layer kernel a regularising operator uses.
#[derive(Debug, Clone, Copy, PartialEq)]
enum SingleLayerKind {
    /// −(1/2π) ln|x−y|
    Laplace,
    /// (1/2π) K_0(k|x−y|), the Helmholtz kernel at wavenumber ik.
    Modified(f64),
}

/// Laplace single-layer operator S_0.
pub fn laplace_single_layer(grid: &BoundaryGrid, opts: &AssemblyOptions) -> Result<DiscreteOperator> {
    single_layer_variant(grid, opts, SingleLayerKind::Laplace)
}

/// Single-layer operator at imaginary wavenumber ik (k > 0).
pub fn modified_single_layer(k: f64, grid: &BoundaryGrid, opts: &AssemblyOptions) -> Result<DiscreteOperator> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!("wavenumber {k} must be positive")));
    }
    single_layer_variant(grid, opts, SingleLayerKind::Modified(k))
}

/// Argument of I_0 up to which the logarithmic part is split off globally;
/// beyond it the split is localised with a smooth cutoff so that the
/// exponentially growing I_0 never has to cancel against K_0.
const MODIFIED_SPLIT_LIMIT: f64 = 10.0;

/// C^∞ cutoff equal to 1 on |s| ≤ δ/2 and 0 on |s| ≥ δ.
fn smooth_cutoff(s: f64, delta: f64) -> f64 {
    let a = s.abs();
    if a <= 0.5 * delta {
        return 1.0;
    }
    if a >= delta {
        return 0.0;
    }
    let u = (delta - a) / (0.5 * delta);
    let f = |x: f64| if x <= 0.0 { 0.0 } else { (-1.0 / x).exp() };
    f(u) / (f(u) + f(1.0 - u))
}

fn single_layer_variant(grid: &BoundaryGrid, opts: &AssemblyOptions, kind: SingleLayerKind) -> Result<DiscreteOperator> {
    check_options(grid, opts)?;
    let n = grid.n;
    let q = opts.oversampling;
    let fine = FineGrid::new(&grid.curve, n, q);
    let m = fine.m;
    let h = fine.h();
    let delta = match kind {
        SingleLayerKind::Modified(k) => {
            let smax = fine.speeds.iter().cloned().fold(0.0, f64::max);
            let diam = fine.points.iter().flat_map(|p| fine.points.iter().map(move |y| (p[0] - y[0]).hypot(p[1] - y[1]))).fold(0.0, f64::max);
            if k * diam <= MODIFIED_SPLIT_LIMIT {
                None
            } else {
                Some((MODIFIED_SPLIT_LIMIT / (k * smax)).min(PI))
            }
        }
        SingleLayerKind::Laplace => None,
    };
    let mut rows = vec![C64::new(0.0, 0.0); n * m];
    rows.par_chunks_mut(m).enumerate().for_each(|(i, row)| {
        let a = q * i;
        let x = fine.points[a];
        let sa = fine.speeds[a];
        for l in 0..m {
            let d = (l + m - a) % m;
            let w = fine.log_w[d];
            let sl = fine.speeds[l];
            let (m1, m2) = if l == a {
                match kind {
                    SingleLayerKind::Laplace => (-1.0 / (4.0 * PI), -(sa * sa).ln() / (4.0 * PI)),
                    SingleLayerKind::Modified(k) => {
                        (-1.0 / (4.0 * PI), (-(k * sa / 2.0).ln() - EULER_GAMMA) / (2.0 * PI))
                    }
                }
            } else {
                let y = fine.points[l];
                let r = (x[0] - y[0]).hypot(x[1] - y[1]);
                let lg = fine.log_t[d];
                match kind {
                    SingleLayerKind::Laplace => (-1.0 / (4.0 * PI), -((r * r).ln() - lg) / (4.0 * PI)),
                    SingleLayerKind::Modified(k) => {
                        let chi = match delta {
                            None => 1.0,
                            Some(dl) => {
                                let mut s = 2.0 * PI * d as f64 / m as f64;
                                if s > PI {
                                    s -= 2.0 * PI;
                                }
                                smooth_cutoff(s, dl)
                            }
                        };
                        let m1 = if chi > 0.0 { -chi * kernel::bessel_i0(k * r) / (4.0 * PI) } else { 0.0 };
                        let full = kernel::bessel_k0(k * r) / (2.0 * PI);
                        (m1, full - m1 * lg)
                    }
                }
            };
            row[l] = C64::new((w * m1 + h * m2) * sl, 0.0);
        }
    });
    ensure_finite(&rows, "single-layer assembly")?;
    let (u, _) = quadrature::interpolation(n, q);
    let mat = &to_mat(n, m, &rows) * &u;
    Ok(DiscreteOperator::l2(mat, Arc::new(grid.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{boundary_grid, make_curve};

    #[test]
    fn cutoff_is_partition_like() {
        assert_eq!(smooth_cutoff(0.1, 1.0), 1.0);
        assert_eq!(smooth_cutoff(1.2, 1.0), 0.0);
        let v = smooth_cutoff(0.75, 1.0);
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fractional_tags_need_circle() {
        let g = Arc::new(boundary_grid(&make_curve("kite", &[]).unwrap(), 32).unwrap());
        let id = DiscreteOperator::identity(g.clone());
        assert!(matches!(id.clone().with_spaces(SpaceTag::HhalfK, SpaceTag::L2), Err(Error::UnsupportedSpace(_))));
        assert!(id.with_spaces(SpaceTag::H1k, SpaceTag::L2).is_ok());
    }
}
