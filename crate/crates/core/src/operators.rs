//! Combined-field operators, Calderón projectors, boundary-to-boundary maps
//! (Dirichlet-to-Neumann, Neumann-to-Dirichlet, interior impedance-to-
//! Dirichlet) and residuals of the inverse decompositions that link them.
//!
//! Conventions: Φ(x, y) = (i/4)H_0^{(1)}(k|x−y|), n the outward normal, and
//! the jump relations give (½ + D)γu = S∂u for interior solutions and
//! (−½ + D)γu = S∂u for radiating exterior ones.

use std::fmt;
use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::assembly::{
    laplace_single_layer, modified_single_layer, weighted_matrix, AssemblyOptions, DiscreteOperator, LayerOperators,
    SpaceTag,
};
use crate::disk_oracle::{mode_table, regularizer_symbols, RegularizerSymbol};
use crate::error::{Error, Result};
use crate::geom::{BoundaryGrid, Point};
use crate::linalg::{condition_number_matrix, inverse_matrix, solve_matrix};

/// Condition estimate above which a factorised operator counts as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

type NodeFn = Arc<dyn Fn(f64, Point) -> f64 + Send + Sync>;

/// Coupling parameter η(x) = a(x)k + i b(x), with a and b functions of the
/// curve parameter t and the boundary point x.
#[derive(Clone)]
pub struct EtaSpec {
    a: NodeFn,
    b: NodeFn,
    label: String,
}

impl fmt::Debug for EtaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EtaSpec({})", self.label)
    }
}

/// Range of a and b over the grid nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaBounds {
    pub a_min: f64,
    pub a_max: f64,
    pub b_min: f64,
    pub b_max: f64,
}

impl EtaBounds {
    /// a keeps one sign bounded away from zero and b ≥ 0.
    pub fn is_admissible(&self) -> bool {
        (self.a_min > 0.0 || self.a_max < 0.0) && self.b_min >= 0.0
    }

    /// Admissible with b bounded below by a positive constant.
    pub fn is_strictly_absorbing(&self) -> bool {
        self.is_admissible() && self.b_min > 0.0
    }
}

impl EtaSpec {
    /// η = a·k + i·b with constant a, b.
    pub fn constant(a: f64, b: f64) -> Self {
        Self { a: Arc::new(move |_, _| a), b: Arc::new(move |_, _| b), label: format!("a={a}, b={b}") }
    }

    /// η = a(t, x)·k + i·b(t, x).
    pub fn variable(
        a: impl Fn(f64, Point) -> f64 + Send + Sync + 'static,
        b: impl Fn(f64, Point) -> f64 + Send + Sync + 'static,
        label: impl Into<String>,
    ) -> Self {
        Self { a: Arc::new(a), b: Arc::new(b), label: label.into() }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn samples(&self, grid: &BoundaryGrid) -> Result<(Vec<f64>, Vec<f64>)> {
        let a: Vec<f64> = grid.nodes.iter().zip(&grid.points).map(|(&t, &x)| (self.a)(t, x)).collect();
        let b: Vec<f64> = grid.nodes.iter().zip(&grid.points).map(|(&t, &x)| (self.b)(t, x)).collect();
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("coupling parameter {}", self.label)));
        }
        Ok((a, b))
    }

    /// η_j = a(x_j)k + i b(x_j) at every grid node.
    pub fn values(&self, k: f64, grid: &BoundaryGrid) -> Result<Vec<C64>> {
        let (a, b) = self.samples(grid)?;
        Ok(a.iter().zip(&b).map(|(&a, &b)| C64::new(a * k, b)).collect())
    }

    pub fn bounds(&self, grid: &BoundaryGrid) -> Result<EtaBounds> {
        let (a, b) = self.samples(grid)?;
        let fold = |v: &[f64]| v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        let (a_min, a_max) = fold(&a);
        let (b_min, b_max) = fold(&b);
        Ok(EtaBounds { a_min, a_max, b_min, b_max })
    }

    /// The single value of η if a and b are constant on the grid.
    pub fn constant_value(&self, k: f64, grid: &BoundaryGrid) -> Result<Option<C64>> {
        let v = self.values(k, grid)?;
        let first = v[0];
        Ok(v.iter().all(|&e| e == first).then_some(first))
    }
}

/// Kind of regularising operator R in R·H + iη(½ − D).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularizerKind {
    /// Laplace single layer.
    S0,
    /// Helmholtz single layer at wavenumber ik.
    Sik,
    /// Identity; degenerate choice that reduces B̃ to B (testing only).
    Identity,
}

#[derive(Debug, Clone)]
pub struct Regularizer {
    pub kind: RegularizerKind,
    /// Wavenumber used for `Sik` (ignored otherwise).
    pub k: f64,
    pub operator: DiscreteOperator,
}

impl Regularizer {
    pub fn s0(grid: &Arc<BoundaryGrid>) -> Result<Self> {
        let op = laplace_single_layer(grid, &AssemblyOptions::default())?;
        Ok(Self { kind: RegularizerKind::S0, k: 0.0, operator: rebind(op, grid) })
    }

    pub fn sik(k: f64, grid: &Arc<BoundaryGrid>) -> Result<Self> {
        let op = modified_single_layer(k, grid, &AssemblyOptions::default())?;
        Ok(Self { kind: RegularizerKind::Sik, k, operator: rebind(op, grid) })
    }

    pub fn identity(grid: &Arc<BoundaryGrid>) -> Self {
        Self { kind: RegularizerKind::Identity, k: 0.0, operator: DiscreteOperator::identity(grid.clone()) }
    }

    /// Circle symbol of R, if it has one.
    fn symbol(&self) -> Option<RegularizerSymbol> {
        match self.kind {
            RegularizerKind::S0 => Some(RegularizerSymbol::S0),
            RegularizerKind::Sik => Some(RegularizerSymbol::Sik),
            RegularizerKind::Identity => None,
        }
    }
}

/// Shares the caller's grid allocation so that later compositions see the
/// same `Arc`.
fn rebind(mut op: DiscreteOperator, grid: &Arc<BoundaryGrid>) -> DiscreteOperator {
    op.grid = grid.clone();
    op
}

fn grid_of(layers: &LayerOperators) -> &Arc<BoundaryGrid> {
    &layers.s.grid
}

fn eta_values(layers: &LayerOperators, eta: &EtaSpec) -> Result<Vec<C64>> {
    eta.values(layers.k, grid_of(layers))
}

fn i_times(v: &[C64]) -> Vec<C64> {
    v.iter().map(|e| C64::new(0.0, 1.0) * e).collect()
}

/// A' = ½I + D' − i·diag(η)S, L² → L².
pub fn build_combined_a(layers: &LayerOperators, eta: &EtaSpec) -> Result<DiscreteOperator> {
    let ieta = i_times(&eta_values(layers, eta)?);
    let ies = layers.s.scale_rows(&ieta)?;
    Ok(layers.dadj.combine(C64::new(1.0, 0.0), &ies, C64::new(-1.0, 0.0))?.shift(C64::new(0.5, 0.0)))
}

/// i·diag(η)(½I − D).
fn impedance_part(layers: &LayerOperators, ieta: &[C64]) -> Result<DiscreteOperator> {
    let half_minus_d = layers.d.combine(C64::new(-1.0, 0.0), &layers.d, C64::new(0.0, 0.0))?.shift(C64::new(0.5, 0.0));
    half_minus_d.scale_rows(ieta)
}

/// B = H + i·diag(η)(½I − D), H¹_k → L².
pub fn build_combined_b(layers: &LayerOperators, eta: &EtaSpec) -> Result<DiscreteOperator> {
    let ieta = i_times(&eta_values(layers, eta)?);
    let imp = impedance_part(layers, &ieta)?;
    let b = layers.h.combine(C64::new(1.0, 0.0), &imp, C64::new(1.0, 0.0))?;
    b.with_spaces(SpaceTag::H1k, SpaceTag::L2)
}

/// B̃ = R·H + i·diag(η)(½I − D), L² → L².  A numerically singular R is
/// reported through the log and the operator is still returned.
pub fn build_combined_btilde(layers: &LayerOperators, eta: &EtaSpec, r: &Regularizer) -> Result<DiscreteOperator> {
    if r.operator.n() != layers.h.n() {
        return Err(Error::DimensionMismatch { expected: layers.h.n(), found: r.operator.n() });
    }
    if r.kind != RegularizerKind::Identity {
        let cond = condition_number_matrix(&weighted_matrix(&r.operator))?;
        if !(cond < SINGULAR_CONDITION) {
            log::warn!("regulariser {:?} is numerically singular (condition {cond:.3e})", r.kind);
        }
    }
    let ieta = i_times(&eta_values(layers, eta)?);
    let imp = impedance_part(layers, &ieta)?;
    let rh = r.operator.compose(&layers.h)?;
    let out = rh.combine(C64::new(1.0, 0.0), &imp, C64::new(1.0, 0.0))?;
    out.with_spaces(SpaceTag::L2, SpaceTag::L2)
}

/// Operator on pairs (Dirichlet, Neumann) of grid functions, stored as a
/// 2N×2N block matrix in the order [γu; ∂ₙu].
#[derive(Debug, Clone)]
pub struct BlockOperator {
    pub matrix: Mat<C64>,
    pub grid: Arc<BoundaryGrid>,
}

impl BlockOperator {
    pub fn n(&self) -> usize {
        self.grid.n
    }

    /// Applies the operator to a Cauchy pair.
    pub fn apply(&self, dirichlet: &[C64], neumann: &[C64]) -> Result<(Vec<C64>, Vec<C64>)> {
        let n = self.n();
        if dirichlet.len() != n || neumann.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: dirichlet.len().max(neumann.len()) });
        }
        let x: Vec<C64> = dirichlet.iter().chain(neumann).copied().collect();
        let mut y = vec![C64::new(0.0, 0.0); 2 * n];
        for (j, xj) in x.iter().enumerate() {
            let col = self.matrix.col(j);
            for (yi, c) in y.iter_mut().zip(col.iter()) {
                *yi += c * xj;
            }
        }
        let neu = y.split_off(n);
        Ok((y, neu))
    }

    /// self ∘ other.
    pub fn compose(&self, other: &BlockOperator) -> BlockOperator {
        BlockOperator { matrix: &self.matrix * &other.matrix, grid: self.grid.clone() }
    }

    /// ‖self − other‖ on L²(Γ) × L²(Γ).
    pub fn distance(&self, other: &BlockOperator) -> Result<f64> {
        let n = self.n();
        let w: Vec<f64> = (0..2 * n).map(|i| self.grid.weights[i % n].sqrt()).collect();
        let m = Mat::from_fn(2 * n, 2 * n, |i, j| (self.matrix[(i, j)] - other.matrix[(i, j)]) * (w[i] / w[j]));
        let s = m.singular_values().map_err(|e| Error::Decomposition(format!("SVD: {e:?}")))?;
        Ok(s[0])
    }
}

/// Interior and exterior Calderón projectors Π∓ = ½I ∓ M with
/// M = [[D, −S], [H, −D']].
#[derive(Debug, Clone)]
pub struct CalderonProjectors {
    pub minus: BlockOperator,
    pub plus: BlockOperator,
}

pub fn calderon_projectors(layers: &LayerOperators) -> CalderonProjectors {
    let n = layers.s.n();
    let m = Mat::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => layers.d.matrix[(i, j)],
        (true, false) => -layers.s.matrix[(i, j - n)],
        (false, true) => layers.h.matrix[(i - n, j)],
        (false, false) => -layers.dadj.matrix[(i - n, j - n)],
    });
    let half = |sign: f64| {
        Mat::from_fn(2 * n, 2 * n, |i, j| {
            let id = if i == j { C64::new(0.5, 0.0) } else { C64::new(0.0, 0.0) };
            id + m[(i, j)] * sign
        })
    };
    let grid = grid_of(layers).clone();
    CalderonProjectors {
        minus: BlockOperator { matrix: half(-1.0), grid: grid.clone() },
        plus: BlockOperator { matrix: half(1.0), grid },
    }
}

/// 1-norm condition estimate ‖A‖₁‖A⁻¹‖₁.
fn condition_one(a: &Mat<C64>, inv: &Mat<C64>) -> f64 {
    let norm1 = |m: &Mat<C64>| (0..m.ncols()).map(|j| m.col(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    norm1(a) * norm1(inv)
}

/// Inverse with the singularity check used by all map builders.
fn checked_inverse(a: &DiscreteOperator) -> Result<DiscreteOperator> {
    let inv = inverse_matrix(&a.matrix)?;
    let cond = condition_one(&a.matrix, &inv);
    if !(cond < SINGULAR_CONDITION) {
        return Err(Error::Singular(1.0 / cond));
    }
    Ok(DiscreteOperator {
        matrix: inv,
        grid: a.grid.clone(),
        source_space: a.target_space,
        target_space: a.source_space,
    })
}

/// The building blocks of all three maps for one (k, η).
#[derive(Debug, Clone)]
pub struct BoundaryMaps {
    pub a_prime: DiscreteOperator,
    pub a_prime_inv: DiscreteOperator,
    pub b: DiscreteOperator,
    pub b_inv: DiscreteOperator,
    pub eta: Vec<C64>,
    /// Exterior Dirichlet-to-Neumann map (A')⁻¹B, H¹_k → L².
    pub dtn: DiscreteOperator,
    /// Exterior Neumann-to-Dirichlet map B⁻¹A', L² → H¹_k.
    pub ntd: DiscreteOperator,
    /// Interior impedance-to-Dirichlet map S(A')⁻¹, L² → L².
    pub itd: DiscreteOperator,
}

pub fn boundary_maps(layers: &LayerOperators, eta: &EtaSpec) -> Result<BoundaryMaps> {
    let a_prime = build_combined_a(layers, eta)?;
    let b = build_combined_b(layers, eta)?;
    let a_prime_inv = checked_inverse(&a_prime)?;
    let b_inv = checked_inverse(&b)?;
    let dtn = a_prime_inv.compose(&b)?;
    let ntd = b_inv.compose(&a_prime)?;
    let itd = layers.s.compose(&a_prime_inv)?;
    Ok(BoundaryMaps { a_prime, a_prime_inv, b, b_inv, eta: eta_values(layers, eta)?, dtn, ntd, itd })
}

/// Exterior Dirichlet-to-Neumann map (A')⁻¹B.
pub fn dtn_map(layers: &LayerOperators, eta: &EtaSpec) -> Result<DiscreteOperator> {
    let a = build_combined_a(layers, eta)?;
    checked_inverse(&a)?.compose(&build_combined_b(layers, eta)?)
}

/// Exterior Neumann-to-Dirichlet map B⁻¹A'.
pub fn ntd_map(layers: &LayerOperators, eta: &EtaSpec) -> Result<DiscreteOperator> {
    let b = build_combined_b(layers, eta)?;
    checked_inverse(&b)?.compose(&build_combined_a(layers, eta)?)
}

/// Interior impedance-to-Dirichlet map S(A')⁻¹: impedance data ∂ₙu − iηγu
/// of an interior solution to its Dirichlet trace.
pub fn itd_map(layers: &LayerOperators, eta: &EtaSpec) -> Result<DiscreteOperator> {
    let a = build_combined_a(layers, eta)?;
    layers.s.compose(&checked_inverse(&a)?)
}

/// DtN map from the single-layer equation alone, S⁻¹(−½I + D); fails near
/// interior Dirichlet eigenvalues.
pub fn dtn_map_single_layer(layers: &LayerOperators) -> Result<DiscreteOperator> {
    let rhs = layers.d.shift(C64::new(-0.5, 0.0));
    checked_inverse(&layers.s)?.compose(&rhs)?.with_spaces(SpaceTag::H1k, SpaceTag::L2)
}

/// Residuals of the inverse decompositions.  `res_btilde` is the
/// mode-level value, available on a centred circle with an S0 or Sik
/// regulariser and constant η.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionResiduals {
    pub res_a: f64,
    pub res_b: f64,
    pub res_btilde: Option<f64>,
}

fn l2_norm_of(m: Mat<C64>, grid: &Arc<BoundaryGrid>) -> Result<f64> {
    let op = DiscreteOperator { matrix: m, grid: grid.clone(), source_space: SpaceTag::L2, target_space: SpaceTag::L2 };
    let s = weighted_matrix(&op).singular_values().map_err(|e| Error::Decomposition(format!("SVD: {e:?}")))?;
    Ok(s[0])
}

/// Residual matrices A'⁻¹ − [I − (P_DtN − iη)P_ItD] and
/// B⁻¹ − [P_NtD − (I − iηP_NtD)P_ItD].
fn residual_matrices(layers: &LayerOperators, eta: &EtaSpec) -> Result<(Mat<C64>, Mat<C64>)> {
    let maps = boundary_maps(layers, eta)?;
    let n = layers.s.n();
    let ieta = i_times(&maps.eta);
    let zero = C64::new(0.0, 0.0);
    let eye = |i: usize, j: usize| if i == j { C64::new(1.0, 0.0) } else { zero };

    let dtn_shift = Mat::from_fn(n, n, |i, j| maps.dtn.matrix[(i, j)] - if i == j { ieta[i] } else { zero });
    let prod = &dtn_shift * &maps.itd.matrix;
    let res_a = Mat::from_fn(n, n, |i, j| maps.a_prime_inv.matrix[(i, j)] - (eye(i, j) - prod[(i, j)]));

    let left = Mat::from_fn(n, n, |i, j| eye(i, j) - ieta[i] * maps.ntd.matrix[(i, j)]);
    let prod = &left * &maps.itd.matrix;
    let res_b = Mat::from_fn(n, n, |i, j| maps.b_inv.matrix[(i, j)] - (maps.ntd.matrix[(i, j)] - prod[(i, j)]));
    Ok((res_a, res_b))
}

/// ‖(A')⁻¹ − [I − (P_DtN − iη)P_ItD]‖ and
/// ‖B⁻¹ − [P_NtD − (I − iηP_NtD)P_ItD]‖ in the discrete L² operator norm,
/// all products being plain matrix products on the grid.
pub fn decomposition_residuals(
    layers: &LayerOperators,
    eta: &EtaSpec,
    r: Option<&Regularizer>,
) -> Result<DecompositionResiduals> {
    let grid = grid_of(layers);
    let n = grid.n;
    let (ma, mb) = residual_matrices(layers, eta)?;
    let res_a = l2_norm_of(ma, grid)?;
    let res_b = l2_norm_of(mb, grid)?;

    let res_btilde = match (r.and_then(Regularizer::symbol), grid.curve.origin_circle_radius()) {
        (Some(kind), Some(radius)) => match eta.constant_value(layers.k, grid)? {
            Some(e) => {
                let rk = if kind == RegularizerSymbol::Sik { r.map_or(layers.k, |r| r.k) } else { 0.0 };
                Some(mode_residuals(layers.k, radius, e, n / 2, Some((kind, rk)))?.res_btilde.unwrap_or(f64::NAN))
            }
            None => None,
        },
        _ => None,
    };
    Ok(DecompositionResiduals { res_a, res_b, res_btilde })
}

/// Defects of the discrete identities restricted to the band |m| < N/2 of
/// an N-point grid, evaluated with operators assembled on 2N points.
///
/// Products of Nyström matrices alias in the top few modes of a grid (a
/// smooth coefficient shifts mode m to m ± 1, which the grid cannot hold
/// when m is near N/2), giving an O(1/N) defect there even though every
/// resolved mode is exact to spectral accuracy.  Evaluating the products on
/// the doubled grid and measuring them on trigonometric interpolants of
/// N-point data separates the two effects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedDefects {
    /// ‖Π₋² − Π₋‖ on L² × L².
    pub projector: f64,
    pub res_a: f64,
    pub res_b: f64,
}

/// `fine` must be assembled on 2N nodes; the result refers to the N-point
/// grid whose nodes are every other fine node.
pub fn resolved_band_defects(fine: &LayerOperators, eta: &EtaSpec) -> Result<ResolvedDefects> {
    let nf = fine.s.n();
    if nf % 4 != 0 {
        return Err(Error::InvalidParameter(format!("fine grid size {nf} must be a multiple of 4")));
    }
    let n = nf / 2;
    let (interp, _) = crate::assembly::quadrature::interpolation(n, 2);
    let fg = grid_of(fine);
    let w: Vec<f64> = (0..n).map(|i| (2.0 * fg.weights[2 * i]).sqrt()).collect();
    // ‖W^{1/2} R M E W^{-1/2}‖ for an nf×nf block of M, with `blocks` blocks per side.
    let band_norm = |m: &Mat<C64>, blocks: usize| -> Result<f64> {
        let e = Mat::from_fn(blocks * nf, blocks * n, |i, j| {
            if i / nf == j / n {
                interp[(i % nf, j % n)]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let me = m * &e;
        let out = Mat::from_fn(blocks * n, blocks * n, |i, j| {
            let (bi, ii) = (i / n, i % n);
            me[(bi * nf + 2 * ii, j)] * (w[ii] / w[j % n])
        });
        let s = out.singular_values().map_err(|err| Error::Decomposition(format!("SVD: {err:?}")))?;
        Ok(s[0])
    };
    let p = calderon_projectors(fine);
    let sq = &p.minus.matrix * &p.minus.matrix;
    let defect = Mat::from_fn(2 * nf, 2 * nf, |i, j| sq[(i, j)] - p.minus.matrix[(i, j)]);
    let (ma, mb) = residual_matrices(fine, eta)?;
    Ok(ResolvedDefects { projector: band_norm(&defect, 2)?, res_a: band_norm(&ma, 1)?, res_b: band_norm(&mb, 1)? })
}

/// Scalar versions of the decompositions, max over |n| ≤ n_max:
/// |1/a'_n − (1 − (p_n − iη)q_n)|, |1/b_n − (1/p_n − (1 − iη/p_n)q_n)| and,
/// with a regulariser of symbol r_n, |1/b̃_n − (1/(p_n r_n) − (1 − iη/(p_n r_n))q^R_n)|
/// where q^R_n = J_n/(r_n kJ_n' − iηJ_n) is the impedance-to-Dirichlet
/// symbol for the boundary condition R∂ₙu − iηγu = g.
pub fn mode_residuals(
    k: f64,
    radius: f64,
    eta: C64,
    n_max: usize,
    regularizer: Option<(RegularizerSymbol, f64)>,
) -> Result<DecompositionResiduals> {
    let t = mode_table(k, radius, eta, n_max)?;
    let ieta = C64::new(0.0, 1.0) * eta;
    let one = C64::new(1.0, 0.0);
    let mut res_a = 0.0f64;
    let mut res_b = 0.0f64;
    for n in 0..=n_max {
        let (p, q) = (t.p[n], t.q[n]);
        res_a = res_a.max((one / t.a_prime[n] - (one - (p - ieta) * q)).norm());
        res_b = res_b.max((one / t.b[n] - (one / p - (one - ieta / p) * q)).norm());
    }
    let res_btilde = match regularizer {
        None => None,
        Some((kind, rk)) => {
            let r = regularizer_symbols(kind, if kind == RegularizerSymbol::Sik { rk } else { k }, radius, n_max)?;
            let ratio = q_ratio(k, radius, n_max)?;
            let mut worst = 0.0f64;
            for n in 0..=n_max {
                let (p, rn) = (t.p[n], r[n]);
                let bt = rn * t.h[n] + ieta * (C64::new(0.5, 0.0) - t.d[n]);
                // q^R = J/(r kJ' − iηJ) = 1/(r·ρ − iη) with ρ = kJ'/J.
                let qr = one / (rn * ratio[n] - ieta);
                let pr = p * rn;
                worst = worst.max((one / bt - (one / pr - (one - ieta / pr) * qr)).norm());
            }
            Some(worst)
        }
    };
    Ok(DecompositionResiduals { res_a, res_b, res_btilde })
}

/// ρ_n = kJ_n'(ka)/J_n(ka), recovered from the tabulated interior symbol
/// q_n at η = 0 (q_n = 1/ρ_n there).
fn q_ratio(k: f64, radius: f64, n_max: usize) -> Result<Vec<C64>> {
    let t = mode_table(k, radius, C64::new(0.0, 0.0), n_max)?;
    Ok(t.q.iter().map(|q| C64::new(1.0, 0.0) / q).collect())
}

/// Right-hand side ∂ₙuⁱ − iηuⁱ of the direct combined-field equation
/// A'∂ₙu = ∂ₙuⁱ − iηuⁱ for sound-soft scattering of uⁱ = e^{ik d·x},
/// d = (cos α, sin α).  Its solution is the Neumann trace of the total field.
pub fn plane_wave_rhs(layers: &LayerOperators, eta: &EtaSpec, direction: f64) -> Result<Vec<C64>> {
    let grid = grid_of(layers);
    let k = layers.k;
    let d = [direction.cos(), direction.sin()];
    let eta = eta_values(layers, eta)?;
    Ok((0..grid.n)
        .map(|j| {
            let (x, n) = (grid.points[j], grid.normals[j]);
            let ui = C64::from_polar(1.0, k * (d[0] * x[0] + d[1] * x[1]));
            ui * C64::new(0.0, k * (d[0] * n[0] + d[1] * n[1])) - C64::new(0.0, 1.0) * eta[j] * ui
        })
        .collect())
}

/// Far-field pattern u∞(x̂) = −e^{iπ/4}/√(8πk) ∫ e^{−ik x̂·y} ∂ₙu(y) ds(y) of
/// the scattered field from the total-field Neumann trace (trapezoid rule).
pub fn far_field_pattern(grid: &BoundaryGrid, k: f64, neumann: &[C64], angle: f64) -> Result<C64> {
    if neumann.len() != grid.n {
        return Err(Error::DimensionMismatch { expected: grid.n, found: neumann.len() });
    }
    let xh = [angle.cos(), angle.sin()];
    let acc: C64 = (0..grid.n)
        .map(|j| {
            let y = grid.points[j];
            C64::from_polar(grid.weights[j], -k * (xh[0] * y[0] + xh[1] * y[1])) * neumann[j]
        })
        .sum();
    Ok(-C64::from_polar(1.0, std::f64::consts::FRAC_PI_4) / (8.0 * std::f64::consts::PI * k).sqrt() * acc)
}

/// Sound-soft plane-wave scattering by a dense solve of the combined-field
/// equation; returns the Neumann trace of the total field.
pub fn solve_sound_soft(layers: &LayerOperators, eta: &EtaSpec, direction: f64) -> Result<Vec<C64>> {
    let a = build_combined_a(layers, eta)?;
    let rhs = plane_wave_rhs(layers, eta, direction)?;
    solve_matrix(&a.matrix, &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_layer_operators, BoundaryFunction};
    use crate::geom::{boundary_grid, make_curve};

    fn circle_layers(k: f64, radius: f64, n: usize) -> LayerOperators {
        let g = boundary_grid(&make_curve("circle", &[radius]).unwrap(), n).unwrap();
        assemble_layer_operators(k, &g).unwrap()
    }

    fn mode_error(op: &DiscreteOperator, m: i64, symbol: C64) -> f64 {
        let f = BoundaryFunction::from_fn(op.grid.clone(), |t, _| C64::from_polar(1.0, m as f64 * t));
        let g = op.apply(&f).unwrap();
        f.values.iter().zip(&g.values).map(|(u, v)| (v - symbol * u).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_eta_reduces_to_layer_operators() {
        let l = circle_layers(3.0, 1.0, 32);
        let a = build_combined_a(&l, &EtaSpec::constant(0.0, 0.0)).unwrap();
        let b = build_combined_b(&l, &EtaSpec::constant(0.0, 0.0)).unwrap();
        let half_dadj = l.dadj.shift(C64::new(0.5, 0.0));
        for i in 0..32 {
            for j in 0..32 {
                assert_eq!(a.matrix[(i, j)], half_dadj.matrix[(i, j)]);
                assert_eq!(b.matrix[(i, j)], l.h.matrix[(i, j)]);
            }
        }
        assert_eq!(b.source_space, SpaceTag::H1k);
    }

    #[test]
    fn variable_and_constant_eta_agree() {
        let l = circle_layers(4.0, 1.0, 32);
        let a1 = build_combined_a(&l, &EtaSpec::constant(1.0, 0.0)).unwrap();
        let a2 = build_combined_a(&l, &EtaSpec::variable(|_, x| 1.0 + 0.0 * x[0], |_, _| 0.0, "one")).unwrap();
        assert_eq!(a1.matrix, a2.matrix);
    }

    #[test]
    fn combined_operators_match_symbols_on_circle() {
        let k = 10.0;
        let l = circle_layers(k, 1.0, 128);
        let eta = EtaSpec::constant(1.0, 0.0);
        let a = build_combined_a(&l, &eta).unwrap();
        let b = build_combined_b(&l, &eta).unwrap();
        let t = mode_table(k, 1.0, C64::new(k, 0.0), 64).unwrap();
        for m in [-40i64, -7, 0, 3, 10, 25, 50] {
            let [_, _, _, _, ap, bs, _, _] = t.at(m);
            assert!(mode_error(&a, m, ap) < 1e-9, "A' mode {m}");
            assert!(mode_error(&b, m, bs) < 1e-9 * (1.0 + bs.norm()), "B mode {m}");
        }
    }

    #[test]
    fn identity_regularizer_gives_b() {
        let l = circle_layers(3.0, 1.0, 32);
        let eta = EtaSpec::constant(1.0, 0.5);
        let bt = build_combined_btilde(&l, &eta, &Regularizer::identity(&l.s.grid)).unwrap();
        let b = build_combined_b(&l, &eta).unwrap();
        let diff = (0..32).flat_map(|i| (0..32).map(move |j| (i, j))).map(|(i, j)| (bt.matrix[(i, j)] - b.matrix[(i, j)]).norm());
        assert!(diff.fold(0.0, f64::max) < 1e-13);
    }

    #[test]
    fn btilde_with_laplace_regularizer_matches_symbols() {
        let (k, radius) = (6.0, 0.8);
        let l = circle_layers(k, radius, 128);
        let eta = EtaSpec::constant(1.0, 0.0);
        let r = Regularizer::s0(&l.s.grid).unwrap();
        let bt = build_combined_btilde(&l, &eta, &r).unwrap();
        let t = mode_table(k, radius, C64::new(k, 0.0), 64).unwrap();
        let rs = regularizer_symbols(RegularizerSymbol::S0, k, radius, 64).unwrap();
        for m in [0i64, 1, 5, 20, 50] {
            let i = m as usize;
            let sym = rs[i] * t.h[i] + C64::new(0.0, k) * (C64::new(0.5, 0.0) - t.d[i]);
            assert!(mode_error(&bt, m, sym) < 1e-9, "mode {m}");
        }
    }

    #[test]
    fn projectors_are_complementary_and_idempotent() {
        let l = circle_layers(5.0, 1.0, 256);
        let p = calderon_projectors(&l);
        let n = 256;
        for i in 0..2 * n {
            for j in 0..2 * n {
                let s = p.minus.matrix[(i, j)] + p.plus.matrix[(i, j)];
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((s - C64::new(id, 0.0)).norm() < 1e-15);
            }
        }
        let sq = p.minus.compose(&p.minus);
        assert!(sq.distance(&p.minus).unwrap() < 1e-8);
    }

    #[test]
    fn maps_match_symbols_on_circle() {
        let k = 10.0;
        let l = circle_layers(k, 1.0, 128);
        let maps = boundary_maps(&l, &EtaSpec::constant(1.0, 0.0)).unwrap();
        let t = mode_table(k, 1.0, C64::new(k, 0.0), 64).unwrap();
        for m in [0i64, 4, 9, 10, 11, 30, 50] {
            let [_, _, _, _, _, _, p, q] = t.at(m);
            assert!(mode_error(&maps.dtn, m, p) < 1e-8 * (1.0 + p.norm()), "DtN mode {m}");
            assert!(mode_error(&maps.ntd, m, 1.0 / p) < 1e-8, "NtD mode {m}");
            assert!(mode_error(&maps.itd, m, q) < 1e-8, "ItD mode {m}");
        }
    }

    #[test]
    fn dtn_independent_of_eta_and_of_construction() {
        let k = 7.5;
        let l = circle_layers(k, 1.0, 96);
        let d1 = dtn_map(&l, &EtaSpec::constant(1.0, 0.0)).unwrap();
        let d2 = dtn_map(&l, &EtaSpec::constant(-1.0, 1.0)).unwrap();
        let d3 = dtn_map_single_layer(&l).unwrap();
        let scale = d1.max_abs();
        for i in 0..96 {
            for j in 0..96 {
                assert!((d1.matrix[(i, j)] - d2.matrix[(i, j)]).norm() < 1e-9 * scale);
                assert!((d1.matrix[(i, j)] - d3.matrix[(i, j)]).norm() < 1e-9 * scale);
            }
        }
    }

    #[test]
    fn mode_level_decompositions() {
        for (a, b) in [(1.0, 0.0), (-1.0, 0.0), (1.0, 1.0), (-1.0, 1.0)] {
            let k = 10.0;
            let r = mode_residuals(k, 1.0, C64::new(a * k, b), 30, None).unwrap();
            assert!(r.res_a < 1e-10 && r.res_b < 1e-10, "{a} {b}: {r:?}");
        }
        let r = mode_residuals(10.0, 0.8, C64::new(10.0, 0.0), 30, Some((RegularizerSymbol::S0, 0.0))).unwrap();
        assert!(r.res_btilde.unwrap() < 1e-8);
    }

    #[test]
    fn eta_bounds() {
        let g = boundary_grid(&make_curve("circle", &[1.0]).unwrap(), 64).unwrap();
        assert!(EtaSpec::constant(1.0, 0.0).bounds(&g).unwrap().is_admissible());
        assert!(!EtaSpec::constant(1.0, 0.0).bounds(&g).unwrap().is_strictly_absorbing());
        assert!(EtaSpec::constant(-1.0, 2.0).bounds(&g).unwrap().is_strictly_absorbing());
        let sign_change = EtaSpec::variable(|t, _| t.cos(), |_, _| 0.0, "cos");
        assert!(!sign_change.bounds(&g).unwrap().is_admissible());
    }
}
