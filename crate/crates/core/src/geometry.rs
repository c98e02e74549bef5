//! Plane geometry of generalized circles: inversions, tangency, dual circles and
//! the geometric construction of a packing by repeated inversion.
//!
//! Internally every circle or line is carried in pencil coordinates
//! `(b, b̄, m)` where `b` is the signed curvature, `m = b·center` and
//! `b̄ = b|center|² − 1/b` (for a line: `b = 0`, `m` the unit normal and
//! `b̄ = 2·offset`). These satisfy `|m|² − b·b̄ = 1`, and inversion in a circle
//! is a linear reflection with respect to the bilinear form
//! `⟨X, Y⟩ = m·m' − (b·b̄' + b̄·b')/2`. Two oriented circles with disjoint
//! interiors are tangent iff `⟨X, Y⟩ = −1` and orthogonal iff `⟨X, Y⟩ = 0`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Tangency residuals below this are treated as tangent.
pub const TANGENCY_TOL: f64 = 1e-9;

const COLLINEAR_TOL: f64 = 1e-12;
const LINE_TOL: f64 = 1e-12;
const DEDUP_SCALE: f64 = 1e6;

/// Axis-aligned closed rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min > x_max || y_min > y_max {
            return Err(Error::domain(format!(
                "invalid rectangle [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        Ok(Rect { x_min, x_max, y_min, y_max })
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            [self.x_min, self.y_min],
            [self.x_max, self.y_min],
            [self.x_max, self.y_max],
            [self.x_min, self.y_max],
        ]
    }

    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.x_min && p[0] <= self.x_max && p[1] >= self.y_min && p[1] <= self.y_max
    }

    /// Euclidean distance from `p` to the rectangle (zero inside).
    pub fn distance_to(&self, p: Point) -> f64 {
        let dx = (self.x_min - p[0]).max(0.0).max(p[0] - self.x_max);
        let dy = (self.y_min - p[1]).max(0.0).max(p[1] - self.y_max);
        dx.hypot(dy)
    }

    /// Largest distance from `p` to a point of the rectangle.
    pub fn farthest_distance(&self, p: Point) -> f64 {
        let dx = (p[0] - self.x_min).abs().max((p[0] - self.x_max).abs());
        let dy = (p[1] - self.y_min).abs().max((p[1] - self.y_max).abs());
        dx.hypot(dy)
    }

    pub fn scaled(&self, factor: f64) -> Rect {
        let (a, b) = (self.x_min * factor, self.x_max * factor);
        let (c, d) = (self.y_min * factor, self.y_max * factor);
        Rect { x_min: a.min(b), x_max: a.max(b), y_min: c.min(d), y_max: c.max(d) }
    }
}

/// An oriented circle or line in the extended plane.
///
/// A proper circle with positive curvature has the disk as its interior; a
/// negative curvature marks a bounding circle whose interior is the outside.
/// A line `{x : normal·x = offset}` has interior `{normal·x > offset}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Circle {
    Proper { center: Point, curvature: f64 },
    Line { normal: Point, offset: f64 },
}

impl Circle {
    pub fn proper(center: Point, curvature: f64) -> Result<Self> {
        if curvature == 0.0 || !curvature.is_finite() || !center.iter().all(|v| v.is_finite()) {
            return Err(Error::domain(format!(
                "proper circle needs finite nonzero curvature, got {curvature}"
            )));
        }
        Ok(Circle::Proper { center, curvature })
    }

    pub fn line(normal: Point, offset: f64) -> Result<Self> {
        let len = normal[0].hypot(normal[1]);
        if !(len > 0.0) || !offset.is_finite() {
            return Err(Error::domain("line needs a nonzero normal"));
        }
        Ok(Circle::Line { normal: [normal[0] / len, normal[1] / len], offset: offset / len })
    }

    pub fn is_line(&self) -> bool {
        matches!(self, Circle::Line { .. })
    }

    /// Signed curvature; zero for lines.
    pub fn curvature(&self) -> f64 {
        match *self {
            Circle::Proper { curvature, .. } => curvature,
            Circle::Line { .. } => 0.0,
        }
    }

    /// Geometric curvature `1/radius`; zero for lines.
    pub fn unsigned_curvature(&self) -> f64 {
        self.curvature().abs()
    }

    pub fn radius(&self) -> f64 {
        match *self {
            Circle::Proper { curvature, .. } => 1.0 / curvature.abs(),
            Circle::Line { .. } => f64::INFINITY,
        }
    }

    pub fn center(&self) -> Option<Point> {
        match *self {
            Circle::Proper { center, .. } => Some(center),
            Circle::Line { .. } => None,
        }
    }

    pub fn coords(&self) -> CircleCoords {
        CircleCoords::from(*self)
    }

    /// Curvature-scaled tangency residual. Proper pairs use
    /// `|d − (r₁ ± r₂)|·max(b₁, b₂)` with the better of external and internal
    /// tangency; parallel lines are tangent at infinity.
    pub fn tangency_residual(&self, other: &Circle) -> f64 {
        match (*self, *other) {
            (
                Circle::Proper { center: c1, curvature: k1 },
                Circle::Proper { center: c2, curvature: k2 },
            ) => {
                let (r1, r2) = (1.0 / k1.abs(), 1.0 / k2.abs());
                let d = dist(c1, c2);
                let ext = (d - (r1 + r2)).abs();
                let int = (d - (r1 - r2).abs()).abs();
                ext.min(int) * k1.abs().max(k2.abs())
            }
            (Circle::Proper { center, curvature }, Circle::Line { normal, offset })
            | (Circle::Line { normal, offset }, Circle::Proper { center, curvature }) => {
                let d = (dot(normal, center) - offset).abs();
                (d - 1.0 / curvature.abs()).abs() * curvature.abs()
            }
            (Circle::Line { normal: n1, .. }, Circle::Line { normal: n2, .. }) => cross(n1, n2).abs(),
        }
    }

    pub fn is_tangent(&self, other: &Circle) -> bool {
        self.tangency_residual(other) < TANGENCY_TOL
    }

    /// Signed distance-like value of `p` relative to the curve; zero on it.
    fn power(&self, p: Point) -> f64 {
        match *self {
            Circle::Proper { center, curvature } => dist(p, center) - 1.0 / curvature.abs(),
            Circle::Line { normal, offset } => dot(normal, p) - offset,
        }
    }

    /// Whether `p` lies strictly inside the oriented interior.
    pub fn interior_contains(&self, p: Point) -> bool {
        match *self {
            Circle::Proper { curvature, .. } if curvature < 0.0 => self.power(p) > 0.0,
            Circle::Proper { .. } => self.power(p) < 0.0,
            Circle::Line { .. } => self.power(p) > 0.0,
        }
    }

    /// Same circle scaled about the origin by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Circle {
        match *self {
            Circle::Proper { center, curvature } => Circle::Proper {
                center: [center[0] * factor, center[1] * factor],
                curvature: curvature / factor,
            },
            Circle::Line { normal, offset } => Circle::Line { normal, offset: offset * factor },
        }
    }
}

/// Pencil coordinates of an oriented generalized circle (see module docs).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleCoords {
    pub b: f64,
    pub bbar: f64,
    pub m: Point,
}

impl From<Circle> for CircleCoords {
    fn from(c: Circle) -> Self {
        match c {
            Circle::Proper { center, curvature: k } => CircleCoords {
                b: k,
                bbar: k * dot(center, center) - 1.0 / k,
                m: [k * center[0], k * center[1]],
            },
            Circle::Line { normal, offset } => CircleCoords { b: 0.0, bbar: 2.0 * offset, m: normal },
        }
    }
}

impl CircleCoords {
    pub fn inner(&self, other: &CircleCoords) -> f64 {
        dot(self.m, other.m) - 0.5 * (self.b * other.bbar + self.bbar * other.b)
    }

    /// Reflection through `mirror`, i.e. inversion in it. `mirror` must be
    /// normalized (`⟨M, M⟩ = 1`).
    pub fn reflect(&self, mirror: &CircleCoords) -> CircleCoords {
        let s = 2.0 * self.inner(mirror);
        CircleCoords {
            b: self.b - s * mirror.b,
            bbar: self.bbar - s * mirror.bbar,
            m: [self.m[0] - s * mirror.m[0], self.m[1] - s * mirror.m[1]],
        }
    }

    pub fn is_line(&self) -> bool {
        self.b.abs() <= LINE_TOL * (1.0 + self.m[0].abs().max(self.m[1].abs()))
    }

    pub fn to_circle(&self) -> Circle {
        if self.is_line() {
            let len = self.m[0].hypot(self.m[1]);
            Circle::Line { normal: [self.m[0] / len, self.m[1] / len], offset: 0.5 * self.bbar / len }
        } else {
            Circle::Proper { center: [self.m[0] / self.b, self.m[1] / self.b], curvature: self.b }
        }
    }

    fn center(&self) -> Option<Point> {
        (!self.is_line()).then(|| [self.m[0] / self.b, self.m[1] / self.b])
    }
}

/// A point of the extended plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedPoint {
    Finite(Point),
    Infinity,
}

/// Inversion in a circle, or reflection in a line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InversionMap {
    pub mirror: Circle,
}

impl InversionMap {
    pub fn new(mirror: Circle) -> Self {
        InversionMap { mirror }
    }
}

/// Image of `x`; fails at the mirror center, which maps to infinity.
pub fn invert_point(map: &InversionMap, x: Point) -> Result<Point> {
    match invert_extended_point(map, ExtendedPoint::Finite(x)) {
        ExtendedPoint::Finite(p) => Ok(p),
        ExtendedPoint::Infinity => Err(Error::PoleAtCenter),
    }
}

/// Projective form of [`invert_point`]: the center and infinity swap.
pub fn invert_extended_point(map: &InversionMap, x: ExtendedPoint) -> ExtendedPoint {
    match (map.mirror, x) {
        (Circle::Proper { center, .. }, ExtendedPoint::Infinity) => ExtendedPoint::Finite(center),
        (Circle::Line { .. }, ExtendedPoint::Infinity) => ExtendedPoint::Infinity,
        (Circle::Proper { center: a, curvature }, ExtendedPoint::Finite(x)) => {
            let d = [x[0] - a[0], x[1] - a[1]];
            let d2 = dot(d, d);
            if d2 == 0.0 {
                return ExtendedPoint::Infinity;
            }
            let s = 1.0 / (curvature * curvature * d2);
            ExtendedPoint::Finite([a[0] + s * d[0], a[1] + s * d[1]])
        }
        (Circle::Line { normal, offset }, ExtendedPoint::Finite(x)) => {
            let s = 2.0 * (dot(normal, x) - offset);
            ExtendedPoint::Finite([x[0] - s * normal[0], x[1] - s * normal[1]])
        }
    }
}

/// Image of an oriented circle. Circles through the mirror center become
/// lines and vice versa.
pub fn invert_circle(map: &InversionMap, c: &Circle) -> Circle {
    c.coords().reflect(&map.mirror.coords()).to_circle()
}

/// The common point of two tangent circles.
pub fn tangency_point(c1: &Circle, c2: &Circle) -> Result<ExtendedPoint> {
    let residual = c1.tangency_residual(c2);
    if residual >= TANGENCY_TOL {
        return Err(Error::NotTangent(residual));
    }
    Ok(match (*c1, *c2) {
        (
            Circle::Proper { center: a, curvature: ka },
            Circle::Proper { center: b, curvature: kb },
        ) => {
            let (ra, rb) = (1.0 / ka.abs(), 1.0 / kb.abs());
            let d = dist(a, b);
            let u = [(b[0] - a[0]) / d, (b[1] - a[1]) / d];
            let external = (d - (ra + rb)).abs() <= (d - (ra - rb).abs()).abs();
            if external || ra >= rb {
                // On the first circle, toward the second center.
                ExtendedPoint::Finite([a[0] + ra * u[0], a[1] + ra * u[1]])
            } else {
                ExtendedPoint::Finite([b[0] - rb * u[0], b[1] - rb * u[1]])
            }
        }
        (Circle::Proper { center, .. }, Circle::Line { normal, offset })
        | (Circle::Line { normal, offset }, Circle::Proper { center, .. }) => {
            let s = dot(normal, center) - offset;
            ExtendedPoint::Finite([center[0] - s * normal[0], center[1] - s * normal[1]])
        }
        (Circle::Line { .. }, Circle::Line { .. }) => ExtendedPoint::Infinity,
    })
}

/// The circle (or line) through three distinct points of the extended plane.
pub fn circle_through(p: [ExtendedPoint; 3]) -> Result<Circle> {
    let finite: Vec<Point> = p
        .iter()
        .filter_map(|q| match q {
            ExtendedPoint::Finite(x) => Some(*x),
            ExtendedPoint::Infinity => None,
        })
        .collect();
    match finite.as_slice() {
        [a, b] => line_through(*a, *b),
        [a, b, c] => {
            let (a, b, c) = (*a, *b, *c);
            let det = 2.0
                * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
            let scale = dist(a, b).max(dist(b, c)).max(dist(a, c));
            if det.abs() <= COLLINEAR_TOL * scale * scale {
                // Pick the two farthest-apart points for the best direction.
                let (u, v) = if dist(a, b) >= dist(a, c) && dist(a, b) >= dist(b, c) {
                    (a, b)
                } else if dist(a, c) >= dist(b, c) {
                    (a, c)
                } else {
                    (b, c)
                };
                return line_through(u, v);
            }
            let (a2, b2, c2) = (dot(a, a), dot(b, b), dot(c, c));
            let ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / det;
            let uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / det;
            let r = dist([ux, uy], a);
            Circle::proper([ux, uy], 1.0 / r)
        }
        _ => Err(Error::domain("circle through points needs at least two finite points")),
    }
}

fn line_through(a: Point, b: Point) -> Result<Circle> {
    let d = [b[0] - a[0], b[1] - a[1]];
    if d[0] == 0.0 && d[1] == 0.0 {
        return Err(Error::domain("line through coincident points"));
    }
    let mut n = [-d[1], d[0]];
    // Canonical orientation so that results are reproducible.
    if n[0] < 0.0 || (n[0] == 0.0 && n[1] < 0.0) {
        n = [-n[0], -n[1]];
    }
    let len = n[0].hypot(n[1]);
    let n = [n[0] / len, n[1] / len];
    Circle::line(n, dot(n, a))
}

/// For each seed circle `Cᵢ`, the circle through the three tangency points of
/// the other three seed circles.
pub fn dual_circles(seed: &[Circle; 4]) -> Result<[Circle; 4]> {
    let mut out = [seed[0]; 4];
    for (i, slot) in out.iter_mut().enumerate() {
        let others: Vec<usize> = (0..4).filter(|&j| j != i).collect();
        let p0 = tangency_point(&seed[others[0]], &seed[others[1]])?;
        let p1 = tangency_point(&seed[others[0]], &seed[others[2]])?;
        let p2 = tangency_point(&seed[others[1]], &seed[others[2]])?;
        *slot = circle_through([p0, p1, p2])?;
    }
    Ok(out)
}

/// Four mutually tangent circles together with their dual circles.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedConfiguration {
    pub circles: [Circle; 4],
    pub duals: [Circle; 4],
}

impl SeedConfiguration {
    pub fn new(circles: [Circle; 4]) -> Result<Self> {
        for i in 0..4 {
            for j in i + 1..4 {
                let r = circles[i].tangency_residual(&circles[j]);
                if r >= TANGENCY_TOL {
                    return Err(Error::NotTangent(r));
                }
            }
        }
        let duals = dual_circles(&circles)?;
        Ok(SeedConfiguration { circles, duals })
    }

    /// Bounding unit circle with inner circles of curvature 2, 2, 3; the
    /// embedding of the root quadruple (−1, 2, 2, 3).
    pub fn standard() -> Self {
        Self::new([
            Circle::Proper { center: [0.0, 0.0], curvature: -1.0 },
            Circle::Proper { center: [0.5, 0.0], curvature: 2.0 },
            Circle::Proper { center: [-0.5, 0.0], curvature: 2.0 },
            Circle::Proper { center: [0.0, 2.0 / 3.0], curvature: 3.0 },
        ])
        .expect("standard seed is tangent")
    }

    /// Lines `y = 0`, `y = 2` and unit circles at `(0, 1)`, `(2, 1)`; the
    /// embedding of the strip root (0, 0, 1, 1).
    pub fn strip() -> Self {
        Self::new([
            Circle::Line { normal: [0.0, -1.0], offset: 0.0 },
            Circle::Line { normal: [0.0, 1.0], offset: 2.0 },
            Circle::Proper { center: [0.0, 1.0], curvature: 1.0 },
            Circle::Proper { center: [2.0, 1.0], curvature: 1.0 },
        ])
        .expect("strip seed is tangent")
    }

    /// Descartes form evaluated on the signed seed curvatures.
    pub fn descartes_residual(&self) -> f64 {
        descartes_form_real(&self.circles.map(|c| c.curvature()))
    }
}

/// `2(a²+b²+c²+d²) − (a+b+c+d)²` in floating point.
pub fn descartes_form_real(v: &[f64; 4]) -> f64 {
    let sum: f64 = v.iter().sum();
    let sq: f64 = v.iter().map(|x| x * x).sum();
    2.0 * sq - sum * sum
}

/// Whether the circle, as a curve, meets the closed rectangle.
pub fn circle_meets_region(c: &Circle, region: &Rect) -> bool {
    match *c {
        Circle::Proper { center, curvature } => {
            let r = 1.0 / curvature.abs();
            region.distance_to(center) <= r && r <= region.farthest_distance(center)
        }
        Circle::Line { .. } => {
            let vals = region.corners().map(|p| c.power(p));
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            lo <= 0.0 && hi >= 0.0
        }
    }
}

/// Whether the side of `mirror` that contains `probe` meets `region`.
///
/// Every circle generated below a swap lies in the interstice on the new
/// circle's side of the corresponding dual circle, so a `false` here allows
/// the whole branch to be pruned.
pub(crate) fn side_meets_region(mirror: &CircleCoords, probe: Point, region: &Rect) -> bool {
    match mirror.center() {
        None => {
            let c = mirror.to_circle();
            let s = c.power(probe).signum();
            let slack = 1e-9 * (1.0 + region.farthest_distance([0.0, 0.0]));
            region.corners().iter().any(|&p| s * c.power(p) >= -slack)
        }
        Some(center) => {
            let r = 1.0 / mirror.b.abs();
            let slack = 1e-9 * (1.0 + r);
            if dist(probe, center) < r {
                region.distance_to(center) <= r + slack
            } else {
                region.farthest_distance(center) >= r - slack
            }
        }
    }
}

#[derive(Clone, Copy)]
struct GeoNode {
    circles: [CircleCoords; 4],
    duals: [CircleCoords; 4],
    last: Option<usize>,
}

/// Builds the packing by breadth-first inversion of the seed in its dual
/// circles. At each node the `i`-th dual inversion replaces circle `i` (the
/// other three are orthogonal to the mirror and stay fixed) and carries the
/// other duals along; the same mirror is never applied twice in a row.
///
/// Returns every circle with unsigned curvature at most `bound` (meeting
/// `region`, when given), sorted canonically.
pub fn generate_packing_geometric(
    seed: &SeedConfiguration,
    bound: f64,
    region: Option<&Rect>,
) -> Result<Vec<Circle>> {
    let min_seed = seed
        .circles
        .iter()
        .map(|c| c.unsigned_curvature())
        .filter(|&k| k > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !(bound > 0.0) {
        return Err(Error::domain(format!("curvature bound must be positive, got {bound}")));
    }
    if seed.circles.iter().all(|c| c.curvature() >= 0.0) && region.is_none() {
        return Err(Error::domain("unbounded packing requires a region"));
    }
    let limit = bound * (1.0 + 1e-9);
    let keep = |c: &Circle| c.unsigned_curvature() <= limit && region.is_none_or(|r| circle_meets_region(c, r));

    let mut out: Vec<Circle> = seed.circles.iter().copied().filter(|c| keep(c)).collect();
    if bound < min_seed {
        sort_circles(&mut out);
        return Ok(out);
    }

    let mut seen: HashMap<(i64, i64, i64), CircleCoords> = HashMap::new();
    for c in &seed.circles {
        let cc = c.coords();
        seen.insert(dedup_key(&cc), cc);
    }

    let mut frontier = vec![GeoNode {
        circles: seed.circles.map(|c| c.coords()),
        duals: seed.duals.map(|c| c.coords()),
        last: None,
    }];

    while !frontier.is_empty() {
        let children: Vec<Vec<GeoNode>> = frontier
            .par_iter()
            .map(|node| expand_geo(node, limit, region))
            .collect();
        let mut next = Vec::new();
        for child in children.into_iter().flatten() {
            let i = child.last.expect("children record their move");
            let new = child.circles[i];
            let key = dedup_key(&new);
            if let Some(prev) = seen.get(&key) {
                let scale = 1.0 + new.b.abs();
                let same = (prev.b - new.b).abs() <= 1e-9 * scale
                    && (prev.m[0] - new.m[0]).abs() <= 1e-9 * scale
                    && (prev.m[1] - new.m[1]).abs() <= 1e-9 * scale;
                if same {
                    continue;
                }
                return Err(Error::ToleranceCollision { curvature: new.b.abs() });
            }
            seen.insert(key, new);
            let circle = new.to_circle();
            if keep(&circle) {
                out.push(circle);
            }
            next.push(child);
        }
        frontier = next;
    }
    sort_circles(&mut out);
    Ok(out)
}

fn expand_geo(node: &GeoNode, limit: f64, region: Option<&Rect>) -> Vec<GeoNode> {
    let mut out = Vec::with_capacity(3);
    for i in 0..4 {
        if node.last == Some(i) {
            continue;
        }
        let mirror = node.duals[i];
        let new = node.circles[i].reflect(&mirror);
        if new.b.abs() > limit {
            continue;
        }
        if let (Some(r), Some(c)) = (region, new.center()) {
            if !side_meets_region(&mirror, c, r) {
                continue;
            }
        }
        let mut child = *node;
        child.circles[i] = new;
        for j in 0..4 {
            if j != i {
                child.duals[j] = node.duals[j].reflect(&mirror);
            }
        }
        child.last = Some(i);
        out.push(child);
    }
    out
}

fn dedup_key(c: &CircleCoords) -> (i64, i64, i64) {
    (
        (c.b.abs() * DEDUP_SCALE).round() as i64,
        (c.m[0] * DEDUP_SCALE).round() as i64,
        (c.m[1] * DEDUP_SCALE).round() as i64,
    )
}

/// Canonical order: lines first, then by unsigned curvature, then center.
pub fn sort_circles(circles: &mut [Circle]) {
    circles.sort_by(|a, b| canonical_key(a).partial_cmp(&canonical_key(b)).unwrap_or(std::cmp::Ordering::Equal));
}

fn canonical_key(c: &Circle) -> (f64, f64, f64, f64) {
    match *c {
        Circle::Line { normal, offset } => (0.0, normal[0], normal[1], offset),
        Circle::Proper { center, curvature } => (curvature.abs(), center[0], center[1], curvature),
    }
}

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Point, b: Point, tol: f64) -> bool {
        dist(a, b) < tol
    }

    fn unit() -> InversionMap {
        InversionMap::new(Circle::Proper { center: [0.0, 0.0], curvature: 1.0 })
    }

    #[test]
    fn invert_point_examples() {
        assert!(close(invert_point(&unit(), [2.0, 0.0]).unwrap(), [0.5, 0.0], 1e-15));
        assert!(close(invert_point(&unit(), [1.0, 0.0]).unwrap(), [1.0, 0.0], 1e-15));
        let r2 = InversionMap::new(Circle::Proper { center: [0.0, 0.0], curvature: 0.5 });
        assert!(close(invert_point(&r2, [1.0, 0.0]).unwrap(), [4.0, 0.0], 1e-15));
        assert!(matches!(invert_point(&unit(), [0.0, 0.0]), Err(Error::PoleAtCenter)));
        assert_eq!(
            invert_extended_point(&unit(), ExtendedPoint::Finite([0.0, 0.0])),
            ExtendedPoint::Infinity
        );
    }

    #[test]
    fn line_mirror_reflects() {
        let m = InversionMap::new(Circle::line([1.0, 0.0], 1.0).unwrap());
        assert!(close(invert_point(&m, [3.0, 2.0]).unwrap(), [-1.0, 2.0], 1e-15));
    }

    fn circle_from_three_images(map: &InversionMap, c: &Circle) -> Circle {
        // Three-point oracle: invert sample points, take their circumcircle.
        let (center, r) = (c.center().unwrap(), c.radius());
        let pts = [0.3f64, 2.1, 4.4].map(|t| {
            let p = [center[0] + r * t.cos(), center[1] + r * t.sin()];
            invert_extended_point(map, ExtendedPoint::Finite(p))
        });
        circle_through(pts).unwrap()
    }

    #[test]
    fn invert_circle_examples() {
        let c = Circle::Proper { center: [3.0, 0.0], curvature: 1.0 };
        let img = invert_circle(&unit(), &c);
        let oracle = circle_from_three_images(&unit(), &c);
        assert!(close(img.center().unwrap(), [0.375, 0.0], 1e-12));
        assert!((img.radius() - 0.125).abs() < 1e-12);
        assert!(close(oracle.center().unwrap(), img.center().unwrap(), 1e-12));
        assert!((oracle.radius() - img.radius()).abs() < 1e-12);

        let fixed = invert_circle(&unit(), &Circle::Proper { center: [0.0, 0.0], curvature: 1.0 });
        assert!((fixed.radius() - 1.0).abs() < 1e-12);
        assert!(close(fixed.center().unwrap(), [0.0, 0.0], 1e-12));

        let through = Circle::Proper { center: [1.0, 0.0], curvature: 1.0 };
        match invert_circle(&unit(), &through) {
            Circle::Line { normal, offset } => {
                assert!((normal[0].abs() - 1.0).abs() < 1e-12 && normal[1].abs() < 1e-12);
                assert!((offset * normal[0] - 0.5).abs() < 1e-12);
            }
            other => panic!("expected a line, got {other:?}"),
        }
    }

    #[test]
    fn tangency_point_examples() {
        let a = Circle::Proper { center: [-0.5, 0.0], curvature: 2.0 };
        let b = Circle::Proper { center: [0.5, 0.0], curvature: 2.0 };
        assert_eq!(tangency_point(&a, &b).unwrap(), ExtendedPoint::Finite([0.0, 0.0]));

        let outer = Circle::Proper { center: [0.0, 0.0], curvature: -1.0 };
        match tangency_point(&outer, &b).unwrap() {
            ExtendedPoint::Finite(p) => assert!(close(p, [1.0, 0.0], 1e-15)),
            _ => panic!(),
        }
        match tangency_point(&b, &outer).unwrap() {
            ExtendedPoint::Finite(p) => assert!(close(p, [1.0, 0.0], 1e-15)),
            _ => panic!(),
        }

        let c = Circle::Proper { center: [0.0, 2.0 / 3.0], curvature: 3.0 };
        let ExtendedPoint::Finite(p) = tangency_point(&b, &c).unwrap() else { panic!() };
        assert!((dist(p, [0.5, 0.0]) - 0.5).abs() < 1e-12);
        assert!((dist(p, [0.0, 2.0 / 3.0]) - 1.0 / 3.0).abs() < 1e-12);

        let far = Circle::Proper { center: [5.0, 0.0], curvature: 1.0 };
        assert!(matches!(tangency_point(&a, &far), Err(Error::NotTangent(_))));
    }

    #[test]
    fn standard_duals() {
        let seed = SeedConfiguration::standard();
        // The dual opposite the curvature-3 circle runs through (0,0), (±1,0).
        match seed.duals[3] {
            Circle::Line { normal, offset } => {
                assert!(normal[0].abs() < 1e-15 && (normal[1].abs() - 1.0).abs() < 1e-15);
                assert!(offset.abs() < 1e-15);
            }
            other => panic!("expected the real axis, got {other:?}"),
        }
        for (i, d) in seed.duals.iter().enumerate() {
            for (j, c) in seed.circles.iter().enumerate() {
                if i != j {
                    let ip = d.coords().inner(&c.coords());
                    assert!(ip.abs() < 1e-12, "dual {i} vs circle {j}: {ip}");
                }
            }
        }
    }

    #[test]
    fn duals_commute_with_mirror_symmetry() {
        let seed = SeedConfiguration::standard();
        let mirror = InversionMap::new(Circle::line([1.0, 0.0], 0.0).unwrap());
        let flipped: Vec<Circle> = seed.circles.iter().map(|c| invert_circle(&mirror, c)).collect();
        // Swap the two curvature-2 circles so indices line up again.
        let reordered = [flipped[0], flipped[2], flipped[1], flipped[3]];
        let duals = dual_circles(&reordered).unwrap();
        let expect = [seed.duals[0], seed.duals[2], seed.duals[1], seed.duals[3]]
            .map(|d| invert_circle(&mirror, &d));
        for (a, b) in duals.iter().zip(expect.iter()) {
            let (x, y) = (a.coords(), b.coords());
            // Orientation of a dual is irrelevant; compare up to sign.
            let diff = (x.b - y.b).abs() + (x.m[0] - y.m[0]).abs() + (x.m[1] - y.m[1]).abs() + (x.bbar - y.bbar).abs();
            let sum = (x.b + y.b).abs() + (x.m[0] + y.m[0]).abs() + (x.m[1] + y.m[1]).abs() + (x.bbar + y.bbar).abs();
            assert!(diff.min(sum) < 1e-12, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn region_predicate() {
        let c = Circle::Proper { center: [0.0, 0.0], curvature: 1.0 };
        assert!(circle_meets_region(&c, &Rect::new(-2.0, 2.0, -2.0, 2.0).unwrap()));
        assert!(!circle_meets_region(&c, &Rect::new(5.0, 6.0, 5.0, 6.0).unwrap()));
        assert!(!circle_meets_region(&c, &Rect::new(0.0, 0.5, 0.0, 0.5).unwrap()));
        let l = Circle::line([0.0, 1.0], 0.5).unwrap();
        assert!(circle_meets_region(&l, &Rect::new(0.0, 1.0, 0.0, 1.0).unwrap()));
        assert!(!circle_meets_region(&l, &Rect::new(0.0, 1.0, 0.6, 1.0).unwrap()));
    }

    #[test]
    fn small_standard_packings() {
        let seed = SeedConfiguration::standard();
        let c3 = generate_packing_geometric(&seed, 3.0, None).unwrap();
        assert_eq!(c3.len(), 5);
        let c1 = generate_packing_geometric(&seed, 1.0, None).unwrap();
        assert_eq!(c1.len(), 1);
        let c6 = generate_packing_geometric(&seed, 6.0, None).unwrap();
        let mut k: Vec<i64> = c6.iter().map(|c| c.unsigned_curvature().round() as i64).collect();
        k.sort();
        assert_eq!(k, vec![1, 2, 2, 3, 3, 6, 6, 6, 6]);
    }

    #[test]
    fn strip_needs_region() {
        let seed = SeedConfiguration::strip();
        assert!(generate_packing_geometric(&seed, 10.0, None).is_err());
        let period = Rect::new(0.0, 2.0, -1.0, 3.0).unwrap();
        let c = generate_packing_geometric(&seed, 1.0, Some(&period)).unwrap();
        assert_eq!(c.iter().filter(|c| !c.is_line()).count(), 2);
        assert_eq!(c.iter().filter(|c| c.is_line()).count(), 2);
    }
}
