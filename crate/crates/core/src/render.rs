//! Deterministic SVG output.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{Circle, Rect};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderOptions {
    /// Output width in pixels; height follows the window's aspect ratio.
    pub width: f64,
    pub stroke_width: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { width: 800.0, stroke_width: 0.5 }
    }
}

/// Clips the line `{p : n·p = offset}` to `window` (Liang–Barsky), or `None`
/// if it misses.
fn clip_line(normal: [f64; 2], offset: f64, window: &Rect) -> Option<([f64; 2], [f64; 2])> {
    let base = [normal[0] * offset, normal[1] * offset];
    let dir = [-normal[1], normal[0]];
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for (axis, lo, hi) in [(0, window.x_min, window.x_max), (1, window.y_min, window.y_max)] {
        if dir[axis].abs() < 1e-15 {
            if base[axis] < lo || base[axis] > hi {
                return None;
            }
            continue;
        }
        let (a, b) = ((lo - base[axis]) / dir[axis], (hi - base[axis]) / dir[axis]);
        t0 = t0.max(a.min(b));
        t1 = t1.min(a.max(b));
    }
    (t0 <= t1).then(|| {
        let at = |t: f64| [base[0] + t * dir[0], base[1] + t * dir[1]];
        (at(t0), at(t1))
    })
}

/// One `<circle>` per proper circle and one `<line>` per line meeting the
/// window, in the given order. Coordinates carry six decimals so identical
/// input yields identical bytes.
pub fn render_svg(circles: &[Circle], window: &Rect, opts: &RenderOptions) -> Result<String> {
    let (w, h) = (window.x_max - window.x_min, window.y_max - window.y_min);
    if !(opts.width > 0.0) {
        return Err(Error::domain("render width must be positive"));
    }
    let scale = opts.width / w;
    let height = h * scale;
    let px = |p: [f64; 2]| ((p[0] - window.x_min) * scale, (window.y_max - p[1]) * scale);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.6}" height="{:.6}" viewBox="0 0 {:.6} {:.6}">"#,
        opts.width, height, opts.width, height
    );
    let _ = writeln!(s, r#"<g fill="none" stroke="black" stroke-width="{:.6}">"#, opts.stroke_width);
    for c in circles {
        match *c {
            Circle::Proper { center, .. } => {
                let (x, y) = px(center);
                let _ = writeln!(s, r#"<circle cx="{x:.6}" cy="{y:.6}" r="{:.6}"/>"#, c.radius() * scale);
            }
            Circle::Line { normal, offset } => {
                if let Some((a, b)) = clip_line(normal, offset, window) {
                    let ((x1, y1), (x2, y2)) = (px(a), px(b));
                    let _ = writeln!(s, r#"<line x1="{x1:.6}" y1="{y1:.6}" x2="{x2:.6}" y2="{y2:.6}"/>"#);
                }
            }
        }
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_packing_geometric, SeedConfiguration};

    #[test]
    fn one_element_per_circle() {
        let circles = generate_packing_geometric(&SeedConfiguration::standard(), 30.0, None).unwrap();
        let window = Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let svg = render_svg(&circles, &window, &RenderOptions::default()).unwrap();
        assert_eq!(svg.matches("<circle ").count(), circles.len());
        assert_eq!(svg, render_svg(&circles, &window, &RenderOptions::default()).unwrap());
        assert!(svg.contains(r#"<circle cx="400.000000" cy="400.000000" r="400.000000"/>"#));
    }

    #[test]
    fn strip_lines() {
        let window = Rect::new(0.0, 2.0, -1.0, 3.0).unwrap();
        let circles = generate_packing_geometric(&SeedConfiguration::strip(), 1.0, Some(&window)).unwrap();
        let svg = render_svg(&circles, &window, &RenderOptions::default()).unwrap();
        assert_eq!(svg.matches("<line ").count(), 2);
        assert!(svg.contains(r#"<line x1="0.000000" y1="1200.000000" x2="800.000000" y2="1200.000000"/>"#)
            || svg.contains(r#"<line x1="800.000000" y1="1200.000000" x2="0.000000" y2="1200.000000"/>"#));
    }

    #[test]
    fn clipping() {
        let w = Rect::new(0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(clip_line([0.0, 1.0], 2.0, &w).is_none());
        let (a, b) = clip_line([1.0, 0.0], 0.5, &w).unwrap();
        assert_eq!(a[0], 0.5);
        assert_eq!((a[1].min(b[1]), a[1].max(b[1])), (0.0, 1.0));
    }
}
