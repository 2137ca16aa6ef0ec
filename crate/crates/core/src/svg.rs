//! Standalone SVG rendering of traces.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::map::BoundaryTrace;

const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// Renders the boundary components, the unit circle and dashed interior
/// lines. The view is the square of half-width `view` about the origin;
/// `None` picks `1.2 · min(max |p|, 6)`.
pub fn render(trace: &BoundaryTrace, interior: &[Vec<Complex64>], view: Option<f64>) -> String {
    let max_r = trace.points.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let half = view.unwrap_or(1.2 * max_r.min(6.0));
    let size = 800.0;
    let scale = size / (2.0 * half);
    let map = |p: Complex64| ((p.re + half) * scale, (half - p.im) * scale);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (cx, cy) = map(Complex64::new(0.0, 0.0));
    let _ = writeln!(
        s,
        r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="#bbbbbb" stroke-width="1"/>"##,
        scale
    );
    for line in interior {
        let _ = writeln!(
            s,
            r##"<polyline fill="none" stroke="#888888" stroke-width="0.8" stroke-dasharray="4 3" points="{}"/>"##,
            points_attr(line, &map)
        );
    }
    for (i, comp) in trace.components().iter().enumerate() {
        let tag = if trace.closed { "polygon" } else { "polyline" };
        let _ = writeln!(
            s,
            r#"<{tag} fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            COLORS[i % COLORS.len()],
            points_attr(comp, &map)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn points_attr<F: Fn(Complex64) -> (f64, f64)>(pts: &[Complex64], map: &F) -> String {
    let mut out = String::with_capacity(pts.len() * 20);
    for p in pts {
        // Far-away points are pulled in so that renderers do not choke;
        // they stay well outside the view.
        let q = if p.norm() > 1e6 { p / p.norm() * 1e6 } else { *p };
        let (x, y) = map(q);
        let _ = write!(out, "{x:.3},{y:.3} ");
    }
    out.pop();
    out
}
