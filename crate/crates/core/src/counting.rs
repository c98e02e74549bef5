//! Counting statistics: `N(T)`, `N(T, E)`, power-law fits, region ratios and
//! box-counting dimension of the residual set.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{circle_meets_region, circle_through, tangency_point, Circle, ExtendedPoint, Rect};
use crate::quad::PackingOrbit;

/// Relative slack when comparing floating curvatures against an integer bound.
const CURVATURE_SLACK: f64 = 1e-9;

/// Counts `N(T)` sampled on a grid of bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct CountCurve {
    pub samples: Vec<(f64, u64)>,
    pub label: String,
}

impl CountCurve {
    /// Builds a curve, rejecting unsorted bounds or decreasing counts.
    pub fn new(samples: Vec<(f64, u64)>, label: impl Into<String>) -> Result<Self> {
        for w in samples.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::domain("count curve bounds must be strictly increasing"));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::domain("count curve must be non-decreasing"));
            }
        }
        Ok(CountCurve { samples, label: label.into() })
    }

    /// CSV with header `T,N`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("T,N\n");
        for &(t, n) in &self.samples {
            let _ = writeln!(s, "{t:.6},{n}");
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentFit {
    pub alpha_hat: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    /// `exp(intercept)`, the prefactor of the fitted power law.
    pub c_hat: f64,
    pub points: usize,
}

/// `points` bounds spaced evenly in `log T` from `t_min` to `t_max` inclusive.
pub fn log_grid(t_min: f64, t_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min) || points < 2 {
        return Err(Error::domain("log grid needs 0 < t_min < t_max and at least 2 points"));
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                t_max
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect())
}

/// Counts with multiplicity from an ascending list of unsigned curvatures
/// complete up to `bound`.
pub fn count_curve_from_sorted(sorted: &[u128], bound: f64, grid: &[f64], label: &str) -> Result<CountCurve> {
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if let Some(&top) = grid.last() {
        if top > bound {
            return Err(Error::domain(format!("grid point {top} exceeds enumeration bound {bound}")));
        }
    }
    let samples = grid
        .iter()
        .map(|&t| {
            let cut = t.floor();
            let n = if cut < 0.0 { 0 } else { sorted.partition_point(|&k| (k as f64) <= cut) };
            (t, n as u64)
        })
        .collect();
    CountCurve::new(samples, label)
}

/// `N(T)` at each grid point, counting unsigned curvatures with multiplicity.
pub fn count_by_curvature(orbit: &PackingOrbit, grid: &[f64]) -> Result<CountCurve> {
    let sorted = orbit.sorted_curvatures();
    count_curve_from_sorted(&sorted, orbit.bound as f64, grid, &orbit.root.to_string())
}

fn within(c: &Circle, t: f64) -> bool {
    c.unsigned_curvature() <= t * (1.0 + CURVATURE_SLACK)
}

/// `N(T, E)`: circles of curvature at most `t` whose curve meets `region`.
pub fn count_in_region(circles: &[Circle], t: f64, region: &Rect) -> u64 {
    circles.par_iter().filter(|c| within(c, t) && circle_meets_region(c, region)).count() as u64
}

/// `N(T, E1) / N(T, E2)`.
pub fn ratio_uniformity(circles: &[Circle], t: f64, e1: &Rect, e2: &Rect) -> Result<f64> {
    let den = count_in_region(circles, t, e2);
    if den == 0 {
        return Err(Error::UndefinedRatio);
    }
    Ok(count_in_region(circles, t, e1) as f64 / den as f64)
}

/// Ordinary least squares `y = slope·x + intercept`, returning the slope's
/// standard error as well.
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = if xs.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    (slope, intercept, stderr)
}

/// Least-squares slope of `log N` against `log T` over samples inside the
/// closed window.
pub fn fit_exponent(curve: &CountCurve, window: (f64, f64)) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = curve
        .samples
        .iter()
        .filter(|(t, _)| *t >= window.0 * (1.0 - 1e-12) && *t <= window.1 * (1.0 + 1e-12))
        .map(|&(t, n)| (t, n as f64))
        .collect();
    if pts.len() < 5 {
        return Err(Error::domain(format!(
            "fit window ({}, {}) holds {} samples, need at least 5",
            window.0,
            window.1,
            pts.len()
        )));
    }
    if pts.iter().any(|&(t, n)| n <= 0.0 || t <= 0.0) {
        return Err(Error::domain("fit window contains a zero count"));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept, stderr) = least_squares(&xs, &ys);
    Ok(ExponentFit { alpha_hat: slope, stderr, window, c_hat: intercept.exp(), points: pts.len() })
}

/// Box counts at each mesh and the fitted dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxCount {
    pub eps: Vec<f64>,
    pub boxes: Vec<u64>,
    pub dimension: f64,
    pub stderr: f64,
    pub warnings: Vec<String>,
}

impl BoxCount {
    /// CSV with header `eps,boxes`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("eps,boxes\n");
        for (e, b) in self.eps.iter().zip(&self.boxes) {
            let _ = writeln!(s, "{e:.9},{b}");
        }
        s
    }

    /// Mean of `B(ε)·ε^α`, a crude proxy for the `α`-dimensional Hausdorff
    /// measure of the residual set.
    pub fn measure_proxy(&self, alpha: f64) -> f64 {
        let n = self.eps.len() as f64;
        self.eps.iter().zip(&self.boxes).map(|(e, &b)| b as f64 * e.powf(alpha)).sum::<f64>() / n
    }
}

/// Uncontrolled estimate of the Apollonian constant: the fitted prefactor
/// divided by the box-count measure proxy at exponent `alpha`.
pub fn apollonian_constant_proxy(fit: &ExponentFit, boxes: &BoxCount, alpha: f64) -> Result<f64> {
    let h = boxes.measure_proxy(alpha);
    if !(h > 0.0) {
        return Err(Error::UndefinedRatio);
    }
    Ok(fit.c_hat / h)
}

struct Bitmap {
    n: usize,
    bits: Vec<u64>,
}

impl Bitmap {
    fn new(n: usize) -> Self {
        Bitmap { n, bits: vec![0; (n * n).div_ceil(64)] }
    }

    fn mark_row(&mut self, row: usize, lo: usize, hi: usize) {
        for col in lo..=hi.min(self.n - 1) {
            let k = row * self.n + col;
            self.bits[k / 64] |= 1 << (k % 64);
        }
    }

    fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }
}

struct Grid {
    origin: [f64; 2],
    eps: f64,
    n: usize,
}

impl Grid {
    fn cell(&self, v: f64, axis: usize) -> Option<usize> {
        let k = ((v - self.origin[axis]) / self.eps).floor();
        if k < 0.0 {
            None
        } else {
            Some((k as usize).min(self.n - 1))
        }
    }

    fn clamp_cell(&self, v: f64, axis: usize) -> usize {
        self.cell(v, axis).unwrap_or(0)
    }

    fn raster(&self, c: &Circle, map: &mut Bitmap) {
        let top = self.origin[1] + self.n as f64 * self.eps;
        match *c {
            Circle::Proper { center, curvature } => {
                let r = 1.0 / curvature.abs();
                let (cy_lo, cy_hi) = (center[1] - r, center[1] + r);
                if cy_hi < self.origin[1] || cy_lo > top {
                    return;
                }
                let (r0, r1) = (self.clamp_cell(cy_lo, 1), self.clamp_cell(cy_hi, 1));
                for row in r0..=r1 {
                    let y0 = self.origin[1] + row as f64 * self.eps;
                    let y1 = y0 + self.eps;
                    let (d0, d1) = ((y0 - center[1]).max(-r), (y1 - center[1]).min(r));
                    if d0 > d1 {
                        continue;
                    }
                    let near = if d0 <= 0.0 && d1 >= 0.0 { 0.0 } else { d0.abs().min(d1.abs()) };
                    let far = d0.abs().max(d1.abs());
                    let dx_max = (r * r - near * near).max(0.0).sqrt();
                    let dx_min = (r * r - far * far).max(0.0).sqrt();
                    for (a, b) in [(center[0] + dx_min, center[0] + dx_max), (center[0] - dx_max, center[0] - dx_min)] {
                        self.mark_span(map, row, a, b);
                    }
                }
            }
            Circle::Line { normal, offset } => {
                // Walk along the axis the line is least steep against.
                let (along, across) = if normal[1].abs() >= normal[0].abs() { (0, 1) } else { (1, 0) };
                for k in 0..self.n {
                    let u0 = self.origin[along] + k as f64 * self.eps;
                    let u1 = u0 + self.eps;
                    let v = |u: f64| (offset - normal[along] * u) / normal[across];
                    let (v0, v1) = (v(u0).min(v(u1)), v(u0).max(v(u1)));
                    let hi = self.origin[across] + self.n as f64 * self.eps;
                    if v1 < self.origin[across] || v0 > hi {
                        continue;
                    }
                    let (c0, c1) = (self.clamp_cell(v0, across), self.clamp_cell(v1, across));
                    for c in c0..=c1 {
                        if along == 0 {
                            map.mark_row(c, k, k);
                        } else {
                            map.mark_row(k, c, c);
                        }
                    }
                }
            }
        }
    }

    fn mark_span(&self, map: &mut Bitmap, row: usize, a: f64, b: f64) {
        let right = self.origin[0] + self.n as f64 * self.eps;
        if b < self.origin[0] || a > right {
            return;
        }
        map.mark_row(row, self.clamp_cell(a, 0), self.clamp_cell(b, 0));
    }
}

/// Smallest axis-aligned square containing every proper circle.
fn bounding_square(circles: &[Circle]) -> Result<Rect> {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for c in circles {
        if let Circle::Proper { center, .. } = *c {
            let r = c.radius();
            for a in 0..2 {
                lo[a] = lo[a].min(center[a] - r);
                hi[a] = hi[a].max(center[a] + r);
            }
        }
    }
    if !lo[0].is_finite() {
        return Err(Error::domain("box counting needs a domain when no proper circle is present"));
    }
    let side = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    Rect::new(lo[0], lo[0] + side, lo[1], lo[1] + side)
}

/// Rasterizes every circle curve onto square grids of mesh `ε` covering
/// `domain` (by default the bounding square of the proper circles), counts
/// occupied boxes and fits the slope of `log B` against `log(1/ε)`.
///
/// A warning is recorded when the finest mesh is not comfortably coarser
/// than the smallest enumerated radius, since missing circles then leave
/// visible holes.
pub fn boxcount_dimension(circles: &[Circle], eps_grid: &[f64], domain: Option<&Rect>) -> Result<BoxCount> {
    if eps_grid.len() < 2 {
        return Err(Error::domain("box counting needs at least two mesh sizes"));
    }
    if eps_grid.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::domain("mesh sizes must be positive"));
    }
    let domain = match domain {
        Some(d) => *d,
        None => bounding_square(circles)?,
    };
    let side = (domain.x_max - domain.x_min).max(domain.y_max - domain.y_min);
    let mut warnings = Vec::new();
    let max_k = circles.iter().map(|c| c.unsigned_curvature()).fold(0.0, f64::max);
    let min_eps = eps_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    if max_k * min_eps < 8.0 {
        let msg = format!(
            "mesh {min_eps:e} is below the resolution supported by curvatures up to {max_k}; counts are biased low"
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }
    for &e in eps_grid {
        let n = (side / e).ceil();
        if n > 65_536.0 {
            return Err(Error::SizeCap { what: "grid cells per side", cap: 65_536 });
        }
    }
    let boxes: Vec<u64> = eps_grid
        .par_iter()
        .map(|&eps| {
            let grid = Grid { origin: [domain.x_min, domain.y_min], eps, n: ((side / eps).ceil() as usize).max(1) };
            let mut map = Bitmap::new(grid.n);
            for c in circles {
                grid.raster(c, &mut map);
            }
            map.count()
        })
        .collect();
    if boxes.contains(&0) {
        return Err(Error::domain("no circle meets the box-counting domain"));
    }
    let xs: Vec<f64> = eps_grid.iter().map(|e| -e.ln()).collect();
    let ys: Vec<f64> = boxes.iter().map(|&b| (b as f64).ln()).collect();
    let (dimension, _, stderr) = least_squares(&xs, &ys);
    Ok(BoxCount { eps: eps_grid.to_vec(), boxes, dimension, stderr, warnings })
}

/// The interstice cut out by three mutually tangent circles: the part of the
/// disk bounded by their dual circle (through the three tangency points) that
/// lies outside all three interiors. For three positive circles this is the
/// bounded curvilinear triangle with concave sides.
#[derive(Clone, Copy, Debug)]
pub struct CurvilinearTriangle {
    pub sides: [Circle; 3],
    /// Center and radius of the dual circle.
    pub dual_center: [f64; 2],
    pub dual_radius: f64,
}

impl CurvilinearTriangle {
    pub fn new(sides: [Circle; 3]) -> Result<Self> {
        let p = |i: usize, j: usize| tangency_point(&sides[i], &sides[j]);
        let pts = [p(0, 1)?, p(0, 2)?, p(1, 2)?];
        if pts.iter().any(|q| matches!(q, ExtendedPoint::Infinity)) {
            return Err(Error::domain("curvilinear triangle with a vertex at infinity is unbounded"));
        }
        match circle_through(pts)? {
            Circle::Proper { center, curvature } => {
                Ok(CurvilinearTriangle { sides, dual_center: center, dual_radius: 1.0 / curvature.abs() })
            }
            Circle::Line { .. } => Err(Error::domain("tangency points are collinear; the interstice is ambiguous")),
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let d = (p[0] - self.dual_center[0]).hypot(p[1] - self.dual_center[1]);
        d < self.dual_radius && self.sides.iter().all(|s| !s.interior_contains(p))
    }

    /// Bounding box of the dual disk, which contains the interstice.
    pub fn bounding_box(&self) -> Rect {
        let [x, y] = self.dual_center;
        let r = self.dual_radius;
        Rect { x_min: x - r, x_max: x + r, y_min: y - r, y_max: y + r }
    }
}

/// Circles of curvature at most `t` lying inside the interstice. The three
/// bounding circles themselves are not counted.
pub fn count_in_triangle(circles: &[Circle], t: f64, tri: &CurvilinearTriangle) -> u64 {
    let bbox = tri.bounding_box();
    circles
        .par_iter()
        .filter(|c| match **c {
            Circle::Proper { center, curvature } => {
                curvature > 0.0 && within(c, t) && bbox.contains(center) && tri.contains(center)
            }
            Circle::Line { .. } => false,
        })
        .count() as u64
}
