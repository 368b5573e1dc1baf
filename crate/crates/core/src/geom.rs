//! Analytic closed curves, their trapezoid-rule discretisations and the
//! star-shapedness margin.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Curve families known by name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    /// (cos t + 0.65 cos 2t − 0.65, 1.5 sin t)
    Kite,
    /// radius 1 + ε cos(m t)
    SmoothStar { eps: f64, m: u32 },
}

/// A regular, counterclockwise, analytic closed curve x(t), t ∈ [0, 2π),
/// optionally scaled about the origin and then translated.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: String,
    pub params: Vec<f64>,
    family: Family,
    scale: f64,
    center: Point,
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.params.is_empty() {
            let p: Vec<String> = self.params.iter().map(|v| format!("{v}")).collect();
            write!(f, "({})", p.join(","))?;
        }
        if self.scale != 1.0 {
            write!(f, "*{}", self.scale)?;
        }
        if self.center != [0.0, 0.0] {
            write!(f, "@({},{})", self.center[0], self.center[1])?;
        }
        Ok(())
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn arity(name: &str, params: &[f64], allowed: &[usize]) -> Result<()> {
    if allowed.contains(&params.len()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} expects {allowed:?} parameters, got {}",
            params.len()
        )))
    }
}

/// Builds a curve from a family name and parameter list.
///
/// * `circle`: `[r]` (default r = 1)
/// * `ellipse`: `[a, b]` semi-axes
/// * `kite`: no parameters
/// * `smooth_star`: `[eps, m]` with integer m ≥ 1 and 0 ≤ eps·m < 1
pub fn make_curve(name: &str, params: &[f64]) -> Result<Curve> {
    let family = match name {
        "circle" => {
            arity(name, params, &[0, 1])?;
            Family::Circle { radius: positive("radius", params.first().copied().unwrap_or(1.0))? }
        }
        "ellipse" => {
            arity(name, params, &[2])?;
            Family::Ellipse { a: positive("semi-axis a", params[0])?, b: positive("semi-axis b", params[1])? }
        }
        "kite" => {
            arity(name, params, &[0])?;
            Family::Kite
        }
        "smooth_star" => {
            arity(name, params, &[2])?;
            let (eps, m) = (params[0], params[1]);
            if !(eps.is_finite() && eps >= 0.0) {
                return Err(Error::InvalidParameter(format!("star amplitude {eps} must be ≥ 0")));
            }
            if !(m.is_finite() && m >= 1.0 && m.fract() == 0.0 && m <= 1.0e4) {
                return Err(Error::InvalidParameter(format!("star frequency {m} must be a positive integer")));
            }
            if eps * m >= 1.0 {
                return Err(Error::InvalidParameter(format!("star with eps·m = {} ≥ 1 is not regular", eps * m)));
            }
            Family::SmoothStar { eps, m: m as u32 }
        }
        other => return Err(Error::InvalidParameter(format!("unknown curve family '{other}'"))),
    };
    Ok(Curve { name: name.to_string(), params: params.to_vec(), family, scale: 1.0, center: [0.0, 0.0] })
}

impl Curve {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// The same curve scaled about the origin by `s > 0` (before translation).
    pub fn scaled(&self, s: f64) -> Result<Curve> {
        positive("scale", s)?;
        Ok(Curve { scale: self.scale * s, center: [self.center[0] * s, self.center[1] * s], ..self.clone() })
    }

    /// The same curve translated by `d`.
    pub fn translated(&self, d: Point) -> Curve {
        Curve { center: [self.center[0] + d[0], self.center[1] + d[1]], ..self.clone() }
    }

    /// Radius if this is a circle centred at the origin (rotation invariance
    /// is what the Fourier-multiplier norms rely on).
    pub fn origin_circle_radius(&self) -> Option<f64> {
        match self.family {
            Family::Circle { radius } if self.center == [0.0, 0.0] => Some(radius * self.scale),
            _ => None,
        }
    }

    /// x(t), x'(t), x''(t) of the untransformed family member.
    fn base(&self, t: f64) -> [Point; 3] {
        let (s, c) = t.sin_cos();
        match self.family {
            Family::Circle { radius: r } => [[r * c, r * s], [-r * s, r * c], [-r * c, -r * s]],
            Family::Ellipse { a, b } => [[a * c, b * s], [-a * s, b * c], [-a * c, -b * s]],
            Family::Kite => {
                let (s2, c2) = (2.0 * t).sin_cos();
                [
                    [c + 0.65 * c2 - 0.65, 1.5 * s],
                    [-s - 1.3 * s2, 1.5 * c],
                    [-c - 2.6 * c2, -1.5 * s],
                ]
            }
            Family::SmoothStar { eps, m } => {
                let mf = m as f64;
                let (sm, cm) = (mf * t).sin_cos();
                let r = 1.0 + eps * cm;
                let r1 = -eps * mf * sm;
                let r2 = -eps * mf * mf * cm;
                [
                    [r * c, r * s],
                    [r1 * c - r * s, r1 * s + r * c],
                    [r2 * c - 2.0 * r1 * s - r * c, r2 * s + 2.0 * r1 * c - r * s],
                ]
            }
        }
    }

    pub fn point(&self, t: f64) -> Point {
        let [p, _, _] = self.base(t);
        [self.center[0] + self.scale * p[0], self.center[1] + self.scale * p[1]]
    }

    pub fn derivative(&self, t: f64) -> Point {
        let [_, d, _] = self.base(t);
        [self.scale * d[0], self.scale * d[1]]
    }

    pub fn second_derivative(&self, t: f64) -> Point {
        let [_, _, d] = self.base(t);
        [self.scale * d[0], self.scale * d[1]]
    }

    pub fn speed(&self, t: f64) -> f64 {
        let d = self.derivative(t);
        d[0].hypot(d[1])
    }

    /// Outward unit normal (x₂', −x₁')/|x'|.
    pub fn normal(&self, t: f64) -> Point {
        let d = self.derivative(t);
        let s = d[0].hypot(d[1]);
        [d[1] / s, -d[0] / s]
    }

    /// Signed curvature (positive for convex counterclockwise arcs).
    pub fn curvature(&self, t: f64) -> f64 {
        let d = self.derivative(t);
        let dd = self.second_derivative(t);
        (d[0] * dd[1] - d[1] * dd[0]) / d[0].hypot(d[1]).powi(3)
    }

    /// Largest |x(t)| over a dense sample (used for enclosing balls).
    pub fn max_radius(&self) -> f64 {
        (0..4096)
            .map(|i| {
                let p = self.point(2.0 * PI * i as f64 / 4096.0);
                p[0].hypot(p[1])
            })
            .fold(0.0, f64::max)
    }
}

/// min over `samples` equispaced parameters of x(t)·n(x(t)).
pub fn star_shaped_margin(curve: &Curve, samples: usize) -> Result<f64> {
    if samples < 256 {
        return Err(Error::InvalidParameter(format!("need at least 256 samples, got {samples}")));
    }
    Ok((0..samples)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / samples as f64;
            let p = curve.point(t);
            let n = curve.normal(t);
            p[0] * n[0] + p[1] * n[1]
        })
        .fold(f64::INFINITY, f64::min))
}

/// Equispaced trapezoid discretisation of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGrid {
    pub curve: Curve,
    pub n: usize,
    pub nodes: Vec<f64>,
    pub points: Vec<Point>,
    pub derivatives: Vec<Point>,
    pub second_derivatives: Vec<Point>,
    pub normals: Vec<Point>,
    pub speeds: Vec<f64>,
    pub weights: Vec<f64>,
}

pub const MIN_GRID: usize = 16;
pub const MAX_GRID: usize = 16384;

/// Builds the N-point trapezoid grid t_j = 2πj/N.
pub fn boundary_grid(curve: &Curve, n: usize) -> Result<BoundaryGrid> {
    if n % 2 != 0 || !(MIN_GRID..=MAX_GRID).contains(&n) {
        return Err(Error::InvalidParameter(format!("grid size {n} must be even and in [{MIN_GRID}, {MAX_GRID}]")));
    }
    let h = 2.0 * PI / n as f64;
    let nodes: Vec<f64> = (0..n).map(|j| h * j as f64).collect();
    let points: Vec<Point> = nodes.iter().map(|&t| curve.point(t)).collect();
    let derivatives: Vec<Point> = nodes.iter().map(|&t| curve.derivative(t)).collect();
    let second_derivatives: Vec<Point> = nodes.iter().map(|&t| curve.second_derivative(t)).collect();
    let speeds: Vec<f64> = derivatives.iter().map(|d| d[0].hypot(d[1])).collect();
    if speeds.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::InvalidParameter("curve is not regular at a grid node".into()));
    }
    let normals: Vec<Point> = derivatives.iter().zip(&speeds).map(|(d, s)| [d[1] / s, -d[0] / s]).collect();
    let weights: Vec<f64> = speeds.iter().map(|s| h * s).collect();

    // Orientation check: the normals must point away from the centroid on average.
    let len: f64 = weights.iter().sum();
    let cx = points.iter().zip(&weights).map(|(p, w)| p[0] * w).sum::<f64>() / len;
    let cy = points.iter().zip(&weights).map(|(p, w)| p[1] * w).sum::<f64>() / len;
    let flux: f64 = (0..n)
        .map(|j| ((points[j][0] - cx) * normals[j][0] + (points[j][1] - cy) * normals[j][1]) * weights[j])
        .sum();
    if flux <= 0.0 {
        return Err(Error::InvalidParameter("curve is not counterclockwise".into()));
    }
    Ok(BoundaryGrid {
        curve: curve.clone(),
        n,
        nodes,
        points,
        derivatives,
        second_derivatives,
        normals,
        speeds,
        weights,
    })
}

impl BoundaryGrid {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Trapezoid approximation of the curve length.
    pub fn length(&self) -> f64 {
        self.weights.iter().sum()
    }
}
