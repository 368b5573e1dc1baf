//! Exterior billiards: straight unit-speed rays with specular reflection off
//! smooth curves and convex polygons, escape-time statistics, and a search
//! for period-two orbits (segments normal to the boundary at both ends) that
//! certify trapping.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{make_curve, Curve, Family, Point};

/// Parameter samples used to bracket ray–curve intersections.
pub const CURVE_SAMPLES: usize = 1024;
/// Distance from a polygon vertex below which a hit counts as a vertex hit.
pub const VERTEX_TOL: f64 = 1e-12;
/// Minimum flight length before the next hit (skips the current bounce point).
const SELF_HIT_TOL: f64 = 1e-9;
/// Hard cap on reflections per ray.
const MAX_BOUNCES: usize = 1_000_000;

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn add_scaled(a: Point, s: f64, v: Point) -> Point {
    [a[0] + s * v[0], a[1] + s * v[1]]
}

fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

/// Obstacle description as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObstacleSpec {
    Curve {
        name: String,
        #[serde(default)]
        params: Vec<f64>,
        #[serde(default = "unit_scale")]
        scale: f64,
        #[serde(default)]
        center: Point,
    },
    Polygon {
        vertices: Vec<Point>,
    },
}

fn unit_scale() -> f64 {
    1.0
}

/// Scene description: obstacles inside the ball of radius `R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec>,
}

/// Convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Validates convexity and general position (no three collinear
    /// vertices) and orients the vertices counter-clockwise.
    pub fn new(mut vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidParameter(format!("polygon needs at least 3 vertices, got {n}")));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("polygon vertex".into()));
        }
        let scale = vertices.iter().map(|&v| norm(v)).fold(1.0, f64::max);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let c = cross(sub(vertices[j], vertices[i]), sub(vertices[k], vertices[i]));
                    if c.abs() <= 1e-12 * scale * scale {
                        return Err(Error::InvalidParameter("three polygon vertices are collinear".into()));
                    }
                }
            }
        }
        let turns: Vec<f64> =
            (0..n).map(|i| cross(sub(vertices[(i + 1) % n], vertices[i]), sub(vertices[(i + 2) % n], vertices[(i + 1) % n]))).collect();
        let positive = turns.iter().all(|&t| t > 0.0);
        let negative = turns.iter().all(|&t| t < 0.0);
        if !(positive || negative) {
            return Err(Error::InvalidParameter("polygon is not convex".into()));
        }
        let area: f64 = (0..n).map(|i| cross(vertices[i], vertices[(i + 1) % n])).sum();
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    fn edge(&self, i: usize) -> (Point, Point) {
        (self.vertices[i], self.vertices[(i + 1) % self.vertices.len()])
    }

    fn contains(&self, p: Point) -> bool {
        (0..self.vertices.len()).all(|i| {
            let (a, b) = self.edge(i);
            cross(sub(b, a), sub(p, a)) > 0.0
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Obstacle {
    Curve(Curve),
    Polygon(Polygon),
}

impl Obstacle {
    fn max_radius(&self) -> f64 {
        match self {
            Obstacle::Curve(c) => c.max_radius(),
            Obstacle::Polygon(p) => p.vertices.iter().map(|&v| norm(v)).fold(0.0, f64::max),
        }
    }

    fn boundary_samples(&self, m: usize) -> Vec<Point> {
        match self {
            Obstacle::Curve(c) => (0..m).map(|i| c.point(2.0 * PI * i as f64 / m as f64)).collect(),
            Obstacle::Polygon(p) => {
                let n = p.vertices.len();
                (0..m)
                    .map(|i| {
                        let u = i as f64 * n as f64 / m as f64;
                        let e = (u.floor() as usize).min(n - 1);
                        let (a, b) = p.edge(e);
                        add_scaled(a, u - e as f64, sub(b, a))
                    })
                    .collect()
            }
        }
    }

    /// Point-in-obstacle test (winding number for curves).
    fn contains(&self, p: Point) -> bool {
        match self {
            Obstacle::Polygon(poly) => poly.contains(p),
            Obstacle::Curve(c) => {
                let m = CURVE_SAMPLES;
                let rel = |i: usize| sub(c.point(2.0 * PI * (i % m) as f64 / m as f64), p);
                let winding: f64 = (0..m).map(|i| {
                    let (a, b) = (rel(i), rel(i + 1));
                    cross(a, b).atan2(dot(a, b))
                }).sum();
                winding.abs() > PI
            }
        }
    }
}

/// Roots (t, s) of the signed distance g(t) = v × (x(t) − p) with
/// s = v·(x(t) − p), bracketed on the sample grid and bisected.
fn curve_roots(c: &Curve, p: Point, v: Point) -> Vec<(f64, f64)> {
    let m = CURVE_SAMPLES;
    let h = 2.0 * PI / m as f64;
    let g = |t: f64| cross(v, sub(c.point(t), p));
    let vals: Vec<f64> = (0..m).map(|i| g(h * i as f64)).collect();
    let mut roots = Vec::new();
    for i in 0..m {
        let (ga, gb) = (vals[i], vals[(i + 1) % m]);
        let (mut a, mut b) = (h * i as f64, h * (i + 1) as f64);
        if ga == 0.0 {
            roots.push(a);
            continue;
        }
        if ga * gb >= 0.0 {
            continue;
        }
        let mut fa = ga;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let fm = g(mid);
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if (fm < 0.0) == (fa < 0.0) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots.into_iter().map(|t| (t, dot(v, sub(c.point(t), p)))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Hit {
    s: f64,
    point: Point,
    normal: Point,
    vertex: bool,
}

/// Obstacles inside the ball |x| < R.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub obstacles: Vec<Obstacle>,
    pub radius: f64,
}

impl Scene {
    pub fn new(obstacles: Vec<Obstacle>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("ball radius {radius} must be positive and finite")));
        }
        for (i, o) in obstacles.iter().enumerate() {
            let r = o.max_radius();
            if r >= radius {
                return Err(Error::InvalidParameter(format!("obstacle {i} reaches radius {r} ≥ R = {radius}")));
            }
        }
        for i in 0..obstacles.len() {
            for j in 0..obstacles.len() {
                if i != j && obstacles[i].boundary_samples(512).iter().any(|&p| obstacles[j].contains(p)) {
                    return Err(Error::InvalidParameter(format!("obstacles {i} and {j} overlap")));
                }
            }
        }
        Ok(Self { obstacles, radius })
    }

    pub fn from_spec(spec: &SceneSpec) -> Result<Self> {
        let obstacles = spec
            .obstacles
            .iter()
            .map(|o| match o {
                ObstacleSpec::Curve { name, params, scale, center } => {
                    Ok(Obstacle::Curve(make_curve(name, params)?.scaled(*scale)?.translated(*center)))
                }
                ObstacleSpec::Polygon { vertices } => Ok(Obstacle::Polygon(Polygon::new(vertices.clone())?)),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(obstacles, spec.radius)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SceneSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("scene JSON: {e}")))?;
        Self::from_spec(&spec)
    }

    /// True if p lies in the exterior domain inside the ball.
    pub fn is_free(&self, p: Point) -> bool {
        norm(p) < self.radius && !self.obstacles.iter().any(|o| o.contains(p))
    }

    fn first_hit(&self, p: Point, v: Point) -> Option<Hit> {
        let mut best: Option<Hit> = None;
        let mut consider = |h: Hit| {
            if best.map_or(true, |b| h.s < b.s) {
                best = Some(h);
            }
        };
        for o in &self.obstacles {
            match o {
                Obstacle::Curve(c) if matches!(c.family(), Family::Circle { .. }) => {
                    // Closed form keeps symmetric orbits exactly symmetric.
                    let Family::Circle { radius } = c.family() else { unreachable!() };
                    let (r, centre) = (radius * c.scale(), c.center());
                    let pc = sub(p, centre);
                    let b = dot(v, pc);
                    let disc = b * b - (dot(pc, pc) - r * r);
                    if disc > 0.0 {
                        let s = -b - disc.sqrt();
                        if s > SELF_HIT_TOL {
                            let point = add_scaled(p, s, v);
                            let q = sub(point, centre);
                            let l = norm(q);
                            consider(Hit { s, point, normal: [q[0] / l, q[1] / l], vertex: false });
                        }
                    }
                }
                Obstacle::Curve(c) => {
                    for (t, s) in curve_roots(c, p, v) {
                        if s > SELF_HIT_TOL {
                            let n = c.normal(t);
                            // Only entries into the obstacle are hits.
                            if dot(n, v) <= 0.0 {
                                consider(Hit { s, point: add_scaled(p, s, v), normal: n, vertex: false });
                            }
                        }
                    }
                }
                Obstacle::Polygon(poly) => {
                    for i in 0..poly.vertices.len() {
                        let (a, b) = poly.edge(i);
                        let e = sub(b, a);
                        let len = norm(e);
                        let n = [e[1] / len, -e[0] / len];
                        if dot(n, v) >= 0.0 {
                            continue;
                        }
                        let den = cross(v, e);
                        let ap = sub(a, p);
                        let s = cross(ap, e) / den;
                        let u = cross(ap, v) / den;
                        let tol = VERTEX_TOL / len;
                        if s > SELF_HIT_TOL && u >= -tol && u <= 1.0 + tol {
                            let vertex = u <= tol || u >= 1.0 - tol;
                            consider(Hit { s, point: add_scaled(p, s, v), normal: n, vertex });
                        }
                    }
                }
            }
        }
        best
    }

    fn exit_distance(&self, p: Point, v: Point) -> f64 {
        let b = dot(p, v);
        let c = dot(p, p) - self.radius * self.radius;
        -b + (b * b - c).max(0.0).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Escaped,
    TimeBudget,
    VertexHit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayOutcome {
    pub escaped: bool,
    /// Time of escape, or elapsed time at termination otherwise.
    pub escape_time: f64,
    pub bounces: usize,
    pub terminated_reason: Termination,
}

fn check_ray(scene: &Scene, start: Point, direction: Point, time_budget: f64) -> Result<Point> {
    if !(time_budget > 0.0 && time_budget.is_finite()) {
        return Err(Error::InvalidParameter(format!("time budget {time_budget} must be positive")));
    }
    let len = norm(direction);
    if !(len > 0.0 && len.is_finite()) || (len - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("direction length {len} is not 1")));
    }
    if !scene.is_free(start) {
        return Err(Error::Domain(format!("start {start:?} is not in the exterior inside the ball")));
    }
    Ok([direction[0] / len, direction[1] / len])
}

/// Traces a ray and records the start, every bounce point and the final
/// position.
pub fn trace_ray_path(scene: &Scene, start: Point, direction: Point, time_budget: f64) -> Result<(RayOutcome, Vec<Point>)> {
    let mut v = check_ray(scene, start, direction, time_budget)?;
    let mut p = start;
    let mut t = 0.0;
    let mut bounces = 0;
    let mut path = vec![start];
    loop {
        let exit = scene.exit_distance(p, v);
        let hit = scene.first_hit(p, v).filter(|h| h.s < exit);
        let Some(h) = hit else {
            if t + exit > time_budget {
                path.push(add_scaled(p, time_budget - t, v));
                return Ok((RayOutcome { escaped: false, escape_time: time_budget, bounces, terminated_reason: Termination::TimeBudget }, path));
            }
            path.push(add_scaled(p, exit, v));
            return Ok((RayOutcome { escaped: true, escape_time: t + exit, bounces, terminated_reason: Termination::Escaped }, path));
        };
        if t + h.s > time_budget || bounces >= MAX_BOUNCES || !h.s.is_finite() {
            path.push(add_scaled(p, (time_budget - t).min(h.s), v));
            return Ok((RayOutcome { escaped: false, escape_time: time_budget.min(t + h.s), bounces, terminated_reason: Termination::TimeBudget }, path));
        }
        t += h.s;
        p = h.point;
        path.push(p);
        if h.vertex {
            return Ok((RayOutcome { escaped: false, escape_time: t, bounces, terminated_reason: Termination::VertexHit }, path));
        }
        v = reflect(v, h.normal);
        bounces += 1;
    }
}

/// Specular reflection v − 2(v·n)n, renormalised.
pub fn reflect(v: Point, n: Point) -> Point {
    let c = 2.0 * dot(v, n);
    let w = [v[0] - c * n[0], v[1] - c * n[1]];
    let l = norm(w);
    [w[0] / l, w[1] / l]
}

pub fn trace_ray(scene: &Scene, start: Point, direction: Point, time_budget: f64) -> Result<RayOutcome> {
    trace_ray_path(scene, start, direction, time_budget).map(|r| r.0)
}

/// A segment normal to the boundary at both ends and lying in the exterior:
/// a period-two billiard orbit, which never leaves the ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodicOrbit {
    pub a: Point,
    pub b: Point,
    pub obstacles: (usize, usize),
    pub length: f64,
}

/// Boundary piece with a C² parametrisation: a whole curve (periodic
/// parameter) or a polygon edge (parameter in [0, 1]).
#[derive(Clone, Copy)]
enum Piece<'a> {
    Curve(&'a Curve),
    Edge(Point, Point),
}

impl Piece<'_> {
    fn eval(&self, s: f64) -> (Point, Point, Point) {
        match self {
            Piece::Curve(c) => (c.point(s), c.derivative(s), c.second_derivative(s)),
            Piece::Edge(a, b) => (add_scaled(*a, s, sub(*b, *a)), sub(*b, *a), [0.0, 0.0]),
        }
    }

    fn starts(&self) -> Vec<f64> {
        match self {
            Piece::Curve(_) => (0..48).map(|i| 2.0 * PI * i as f64 / 48.0).collect(),
            Piece::Edge(..) => (1..8).map(|i| i as f64 / 8.0).collect(),
        }
    }

    fn admissible(&self, s: f64) -> bool {
        match self {
            Piece::Curve(_) => true,
            Piece::Edge(..) => s > 1e-9 && s < 1.0 - 1e-9,
        }
    }

    fn normal(&self, s: f64) -> Point {
        let (_, d, _) = self.eval(s);
        let l = norm(d);
        [d[1] / l, -d[0] / l]
    }
}

fn common_normal(p: Piece, q: Piece, s0: f64, t0: f64) -> Option<(f64, f64)> {
    let (mut s, mut t) = (s0, t0);
    for _ in 0..50 {
        let (x, dx, ddx) = p.eval(s);
        let (y, dy, ddy) = q.eval(t);
        let r = sub(x, y);
        let f1 = dot(r, dx);
        let f2 = dot(r, dy);
        let j11 = dot(dx, dx) + dot(r, ddx);
        let j12 = -dot(dy, dx);
        let j21 = dot(dx, dy);
        let j22 = -dot(dy, dy) + dot(r, ddy);
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-300 {
            return None;
        }
        let ds = (f1 * j22 - f2 * j12) / det;
        let dt = (j11 * f2 - j21 * f1) / det;
        s -= ds;
        t -= dt;
        if !(s.is_finite() && t.is_finite()) || s.abs() > 1e3 || t.abs() > 1e3 {
            return None;
        }
        if ds.abs() + dt.abs() < 1e-14 {
            let (x, dx, _) = p.eval(s);
            let (y, dy, _) = q.eval(t);
            let r = sub(x, y);
            let scale = norm(r) * (norm(dx) + norm(dy));
            return (dot(r, dx).abs() + dot(r, dy).abs() <= 1e-10 * scale).then_some((s, t));
        }
    }
    None
}

fn pieces(o: &Obstacle) -> Vec<Piece<'_>> {
    match o {
        Obstacle::Curve(c) => vec![Piece::Curve(c)],
        Obstacle::Polygon(p) => (0..p.vertices.len()).map(|i| {
            let (a, b) = p.edge(i);
            Piece::Edge(a, b)
        }).collect(),
    }
}

/// Searches for period-two orbits between every pair of boundary pieces
/// (including a curve with itself).  Each candidate is verified by tracing:
/// a ray leaving one end along the segment must first hit the other end.
pub fn periodic_orbit_witnesses(scene: &Scene) -> Vec<PeriodicOrbit> {
    let mut found: Vec<PeriodicOrbit> = Vec::new();
    let all: Vec<(usize, Piece)> = scene.obstacles.iter().enumerate().flat_map(|(i, o)| pieces(o).into_iter().map(move |p| (i, p))).collect();
    for (ia, &(oa, pa)) in all.iter().enumerate() {
        for &(ob, pb) in &all[ia..] {
            // Distinct edges of one convex polygon cannot face each other.
            if oa == ob && matches!(pa, Piece::Edge(..)) {
                continue;
            }
            for &s0 in &pa.starts() {
                for &t0 in &pb.starts() {
                    let Some((s, t)) = common_normal(pa, pb, s0, t0) else { continue };
                    if !(pa.admissible(s) && pb.admissible(t)) {
                        continue;
                    }
                    let (x, _, _) = pa.eval(s);
                    let (y, _, _) = pb.eval(t);
                    let d = sub(y, x);
                    let len = norm(d);
                    if len < 1e-6 {
                        continue;
                    }
                    let u = [d[0] / len, d[1] / len];
                    if dot(pa.normal(s), u) <= 0.999_999 || dot(pb.normal(t), u) >= -0.999_999 {
                        continue;
                    }
                    if found.iter().any(|w| {
                        (norm(sub(w.a, x)) < 1e-7 && norm(sub(w.b, y)) < 1e-7) || (norm(sub(w.a, y)) < 1e-7 && norm(sub(w.b, x)) < 1e-7)
                    }) {
                        continue;
                    }
                    let clear = scene.first_hit(x, u).is_some_and(|h| (h.s - len).abs() < 1e-8 * (1.0 + len))
                        && scene.first_hit(y, [-u[0], -u[1]]).is_some_and(|h| (h.s - len).abs() < 1e-8 * (1.0 + len));
                    if clear {
                        found.push(PeriodicOrbit { a: x, b: y, obstacles: (oa, ob), length: len });
                    }
                }
            }
        }
    }
    found
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    NontrappingEmpirical,
    TrappingEmpirical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeStatistics {
    pub samples: usize,
    pub escaped: usize,
    pub vertex_hits: usize,
    pub budget_exhausted: usize,
    /// Largest escape time among escaped rays (None if none escaped).
    pub max_escape_time: Option<f64>,
    /// escaped / (samples − vertex_hits).
    pub fraction_escaped: f64,
    pub witnesses: Vec<PeriodicOrbit>,
    pub classification: Classification,
}

/// Smallest accepted sample count.
pub const MIN_SAMPLES: usize = 1000;

/// Uniform start in the exterior part of the ball and uniform direction,
/// drawn from the ray's own stream.
fn sample_ray(scene: &Scene, seed: u64, index: usize) -> (Point, Point) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    loop {
        let r = scene.radius * rng.random::<f64>().sqrt();
        let th = 2.0 * PI * rng.random::<f64>();
        let p = [r * th.cos(), r * th.sin()];
        if scene.is_free(p) {
            let phi = 2.0 * PI * rng.random::<f64>();
            return (p, [phi.cos(), phi.sin()]);
        }
    }
}

/// Empirical escape statistics.  The scene is classified nontrapping iff
/// every sampled ray (vertex hits excluded) escaped within the budget and no
/// period-two orbit was found.
pub fn escape_statistics(scene: &Scene, sample_count: usize, time_budget: f64, seed: u64) -> Result<EscapeStatistics> {
    if sample_count < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!("sample count {sample_count} < {MIN_SAMPLES}")));
    }
    let outcomes: Vec<RayOutcome> = (0..sample_count)
        .into_par_iter()
        .map(|i| {
            let (p, v) = sample_ray(scene, seed, i);
            trace_ray(scene, p, v, time_budget)
        })
        .collect::<Result<_>>()?;
    let escaped = outcomes.iter().filter(|o| o.escaped).count();
    let vertex_hits = outcomes.iter().filter(|o| o.terminated_reason == Termination::VertexHit).count();
    let budget_exhausted = outcomes.iter().filter(|o| o.terminated_reason == Termination::TimeBudget).count();
    let max_escape_time = outcomes.iter().filter(|o| o.escaped).map(|o| o.escape_time).reduce(f64::max);
    let counted = sample_count - vertex_hits;
    let fraction_escaped = if counted == 0 { 1.0 } else { escaped as f64 / counted as f64 };
    let witnesses = periodic_orbit_witnesses(scene);
    let classification = if escaped == counted && witnesses.is_empty() {
        Classification::NontrappingEmpirical
    } else {
        Classification::TrappingEmpirical
    };
    Ok(EscapeStatistics { samples: sample_count, escaped, vertex_hits, budget_exhausted, max_escape_time, fraction_escaped, witnesses, classification })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(center: Point) -> Obstacle {
        Obstacle::Curve(make_curve("circle", &[1.0]).unwrap().translated(center))
    }

    #[test]
    fn straight_exit() {
        let s = Scene::new(vec![disc([0.0, 0.0])], 10.0).unwrap();
        let o = trace_ray(&s, [2.0, 0.0], [1.0, 0.0], 100.0).unwrap();
        assert!(o.escaped && o.bounces == 0);
        assert!((o.escape_time - 8.0).abs() < 1e-12);
    }

    #[test]
    fn head_on_reflection() {
        let s = Scene::new(vec![disc([0.0, 0.0])], 10.0).unwrap();
        let o = trace_ray(&s, [2.0, 0.0], [-1.0, 0.0], 100.0).unwrap();
        assert!(o.escaped && o.bounces == 1);
        assert!((o.escape_time - 10.0).abs() < 1e-9);
    }

    #[test]
    fn two_disc_periodic_orbit() {
        let s = Scene::new(vec![disc([2.0, 0.0]), disc([-2.0, 0.0])], 10.0).unwrap();
        let o = trace_ray(&s, [0.0, 0.0], [1.0, 0.0], 50.0).unwrap();
        assert!(!o.escaped);
        assert_eq!(o.terminated_reason, Termination::TimeBudget);
        assert!(o.bounces >= 24, "{o:?}");
        let w = periodic_orbit_witnesses(&s);
        assert_eq!(w.len(), 1);
        assert!((w[0].length - 2.0).abs() < 1e-10);
    }

    #[test]
    fn empty_scene_chords() {
        let s = Scene::new(vec![], 3.0).unwrap();
        let st = escape_statistics(&s, 1000, 10.0, 7).unwrap();
        assert_eq!(st.fraction_escaped, 1.0);
        assert!(st.max_escape_time.unwrap() <= 6.0);
        assert_eq!(st.classification, Classification::NontrappingEmpirical);
    }

    #[test]
    fn polygon_reflection_and_vertex() {
        let sq = Polygon::new(vec![[-1.0, -1.0], [-1.0, 1.0], [1.0, 1.0], [1.0, -1.0]]).unwrap();
        let s = Scene::new(vec![Obstacle::Polygon(sq)], 5.0).unwrap();
        let o = trace_ray(&s, [3.0, 0.5], [-1.0, 0.0], 100.0).unwrap();
        assert_eq!(o.bounces, 1);
        assert!((o.escape_time - (1.0 + 24.75f64.sqrt())).abs() < 1e-12);
        let d = [-1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt()];
        let o = trace_ray(&s, [3.0, 3.0], d, 100.0).unwrap();
        assert_eq!(o.terminated_reason, Termination::VertexHit);
    }

    #[test]
    fn rejects_invalid_scenes() {
        assert!(Scene::new(vec![disc([0.0, 0.0]), disc([1.0, 0.0])], 10.0).is_err());
        assert!(Scene::new(vec![disc([0.0, 0.0])], 0.5).is_err());
        assert!(Polygon::new(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).is_err());
        assert!(Polygon::new(vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.2], [1.0, 2.0]]).is_err());
        assert!(Scene::from_json(r#"{"R": 5, "obstacles": [{"type": "blob"}]}"#).is_err());
        let s = Scene::from_json(r#"{"R": 5, "obstacles": [{"type": "curve", "name": "kite"}]}"#).unwrap();
        assert_eq!(s.obstacles.len(), 1);
        let s = Scene::new(vec![disc([0.0, 0.0])], 10.0).unwrap();
        assert!(trace_ray(&s, [0.0, 0.0], [1.0, 0.0], 1.0).is_err());
        assert!(trace_ray(&s, [2.0, 0.0], [2.0, 0.0], 1.0).is_err());
    }
}
