//! Bessel and Hankel functions of integer and real order for real and
//! complex argument, and the Helmholtz fundamental solution.
//!
//! Integer orders use Miller's backward recurrence normalised by the
//! generating-function sum, with Y obtained from the Neumann series and
//! forward recurrence.  Non-integer orders use the ascending series for
//! |z| ≤ 12 and Miller's algorithm with a Gamma-weighted normalisation
//! beyond, Y following from the connection formula.  All recurrences carry a
//! binary exponent so that high orders never overflow internally.

pub(crate) mod kernel;
mod recurrence;
mod scaled;

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
pub use scaled::ScaledComplex;

/// Largest supported |z| and order.
pub const MAX_ARGUMENT: f64 = 1.0e4;
pub const MAX_ORDER: f64 = 1.0e4;
/// Largest supported |Im z|.
pub const MAX_IMAG: f64 = 10.0;
/// Argument modulus at which non-integer orders switch from the power
/// series to the backward recurrence.
pub const SERIES_SWITCH: f64 = 12.0;
/// Orders closer than this to an integer take the integer branch.
pub const INTEGER_SNAP: f64 = 1.0e-6;

/// J, Y and their derivatives at one order and argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub order: f64,
    pub argument: C64,
    pub j: C64,
    pub y: C64,
    pub jprime: C64,
    pub yprime: C64,
}

impl BesselEval {
    pub fn hankel1(&self) -> C64 {
        self.j + C64::i() * self.y
    }

    pub fn hankel1_prime(&self) -> C64 {
        self.jprime + C64::i() * self.yprime
    }

    /// J·Y' − J'·Y, which equals 2/(πz).
    pub fn wronskian(&self) -> C64 {
        self.j * self.yprime - self.jprime * self.y
    }
}

fn check_argument(z: C64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::Domain("argument z = 0".into()));
    }
    if z.norm() > MAX_ARGUMENT {
        return Err(Error::Domain(format!("|z| = {} exceeds {MAX_ARGUMENT}", z.norm())));
    }
    if z.im.abs() > MAX_IMAG {
        return Err(Error::Domain(format!("|Im z| = {} exceeds {MAX_IMAG}", z.im.abs())));
    }
    Ok(())
}

fn check_order(order: f64) -> Result<()> {
    if !order.is_finite() || order < 0.0 || order > MAX_ORDER {
        return Err(Error::Domain(format!("order {order} outside [0, {MAX_ORDER}]")));
    }
    Ok(())
}

/// Splits ν into (integer part, fractional part), snapping near-integers.
fn split_order(order: f64) -> (usize, f64) {
    let n = order.floor();
    let frac = order - n;
    if frac < INTEGER_SNAP {
        (n as usize, 0.0)
    } else if frac > 1.0 - INTEGER_SNAP {
        (n as usize + 1, 0.0)
    } else {
        (n as usize, frac)
    }
}

/// (J_ν, J_{ν+1}, Y_ν, Y_{ν+1}) in scaled form.
fn scaled_values(order: f64, z: C64) -> [ScaledComplex; 4] {
    let (n, nu0) = split_order(order);
    if nu0 == 0.0 {
        let seq = recurrence::integer_sequences(z, n);
        return [seq.j[n], seq.j[n + 1], seq.y[n], seq.y[n + 1]];
    }
    fractional_values(n, nu0, z, z.norm() <= SERIES_SWITCH)
}

pub(crate) fn fractional_values(n: usize, nu0: f64, z: C64, use_series: bool) -> [ScaledComplex; 4] {
    let mu0 = 1.0 - nu0;
    let (j_nu0, j_nu0p1, j_neg, j_neg1, j_top, j_top1);
    if use_series {
        j_nu0 = recurrence::series_j(nu0, z).value_lossy();
        j_nu0p1 = recurrence::series_j(nu0 + 1.0, z).value_lossy();
        j_neg = recurrence::series_j(-nu0, z).value_lossy();
        j_neg1 = recurrence::series_j(-nu0 - 1.0, z).value_lossy();
        j_top = recurrence::series_j(nu0 + n as f64, z);
        j_top1 = recurrence::series_j(nu0 + n as f64 + 1.0, z);
    } else {
        let seq = recurrence::fractional_j_sequence(nu0, z, n);
        let mseq = recurrence::fractional_j_sequence(mu0, z, 0);
        let jm0 = mseq[0].value_lossy();
        let jm1 = mseq[1].value_lossy();
        let j_mu_minus1 = 2.0 * mu0 / z * jm0 - jm1;
        let j_mu_minus2 = 2.0 * (mu0 - 1.0) / z * j_mu_minus1 - jm0;
        j_nu0 = seq[0].value_lossy();
        j_nu0p1 = seq[1].value_lossy();
        j_neg = j_mu_minus1;
        j_neg1 = j_mu_minus2;
        j_top = seq[n];
        j_top1 = seq[n + 1];
    }
    let (s, c) = (nu0 * PI).sin_cos();
    let y0 = (j_nu0 * c - j_neg) / s;
    let y1 = (j_nu0p1 * c + j_neg1) / s;
    // Forward recurrence Y_{μ+1} = (2μ/z) Y_μ − Y_{μ−1}.
    let (mut prev, mut cur, mut exp) = (y0, y1, 0i32);
    let mut y_n = ScaledComplex::from_c64(y0);
    let mut y_n1 = ScaledComplex::from_c64(y1);
    for m in 1..=n {
        let mu = nu0 + m as f64;
        let next = 2.0 * mu / z * cur - prev;
        prev = cur;
        cur = next;
        if cur.re.abs().max(cur.im.abs()) > 1e150 {
            prev *= 2f64.powi(-500);
            cur *= 2f64.powi(-500);
            exp += 500;
        }
        y_n = ScaledComplex::new(prev, exp);
        y_n1 = ScaledComplex::new(cur, exp);
    }
    [j_top, j_top1, y_n, y_n1]
}

fn assemble_eval(order: f64, z: C64, v: [ScaledComplex; 4]) -> Result<BesselEval> {
    let [j, j1, y, y1] = v;
    let nu_over_z = ScaledComplex::from_c64(order / z);
    let jp = nu_over_z.mul(j).sub(j1);
    let yp = nu_over_z.mul(y).sub(y1);
    let out = BesselEval {
        order,
        argument: z,
        j: j.value()?,
        y: y.value()?,
        jprime: jp.value()?,
        yprime: yp.value()?,
    };
    Ok(out)
}

/// J_ν(z), Y_ν(z) and their derivatives.
pub fn bessel(order: f64, z: C64) -> Result<BesselEval> {
    check_order(order)?;
    check_argument(z)?;
    assemble_eval(order, z, scaled_values(order, z))
}

/// H_ν^{(1)}(z) = J + iY and its derivative.
pub fn hankel1(order: f64, z: C64) -> Result<(C64, C64)> {
    let b = bessel(order, z)?;
    Ok((b.hankel1(), b.hankel1_prime()))
}

/// Integer-order values J_n, Y_n for n = 0..=n_max at a single argument,
/// kept in scaled form so that neither underflow nor overflow occurs.
#[derive(Debug, Clone)]
pub struct BesselSequence {
    pub argument: C64,
    j: Vec<ScaledComplex>,
    y: Vec<ScaledComplex>,
}

/// Largest order accepted by [`bessel_sequence`].
pub const MAX_SEQUENCE_ORDER: usize = 60_000;

impl BesselSequence {
    pub fn max_order(&self) -> usize {
        self.j.len() - 2
    }

    pub fn j(&self, n: usize) -> ScaledComplex {
        self.j[n]
    }

    pub fn y(&self, n: usize) -> ScaledComplex {
        self.y[n]
    }

    pub fn jprime(&self, n: usize) -> ScaledComplex {
        let c = ScaledComplex::from_c64(n as f64 / self.argument);
        c.mul(self.j[n]).sub(self.j[n + 1])
    }

    pub fn yprime(&self, n: usize) -> ScaledComplex {
        let c = ScaledComplex::from_c64(n as f64 / self.argument);
        c.mul(self.y[n]).sub(self.y[n + 1])
    }

    pub fn hankel1(&self, n: usize) -> ScaledComplex {
        self.j(n).add(self.y(n).scale(C64::i()))
    }

    pub fn hankel1_prime(&self, n: usize) -> ScaledComplex {
        self.jprime(n).add(self.yprime(n).scale(C64::i()))
    }
}

/// J_n(z), Y_n(z) for all n in 0..=n_max.
pub fn bessel_sequence(n_max: usize, z: C64) -> Result<BesselSequence> {
    check_argument(z)?;
    if n_max > MAX_SEQUENCE_ORDER {
        return Err(Error::Domain(format!("order {n_max} exceeds {MAX_SEQUENCE_ORDER}")));
    }
    let seq = recurrence::integer_sequences(z, n_max);
    Ok(BesselSequence { argument: z, j: seq.j, y: seq.y })
}

/// Spatial dimension for [`fundamental_solution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Two,
    Three,
}

impl Dimension {
    pub fn as_usize(self) -> usize {
        match self {
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }
}

/// Minimum separation accepted by [`fundamental_solution`].
pub const COINCIDENCE_TOL: f64 = 1.0e-14;

/// Outgoing fundamental solution Φ_k(x, y) of Δ + k²:
/// (i/4) H_0^{(1)}(k|x−y|) in 2-D and e^{ik|x−y|}/(4π|x−y|) in 3-D.
pub fn fundamental_solution(k: f64, x: &[f64], y: &[f64], dim: Dimension) -> Result<C64> {
    let d = dim.as_usize();
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: x.len() });
    }
    if y.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: y.len() });
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter(format!("wavenumber {k} must be positive")));
    }
    let r = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    if r < COINCIDENCE_TOL {
        return Err(Error::Coincidence(r));
    }
    match dim {
        Dimension::Two => {
            let (h, _) = hankel1(0.0, C64::new(k * r, 0.0))?;
            Ok(C64::new(0.0, 0.25) * h)
        }
        Dimension::Three => Ok(C64::from_polar(1.0, k * r) / (4.0 * PI * r)),
    }
}
