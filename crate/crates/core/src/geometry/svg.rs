use std::fmt::Write as _;

use crate::geometry::curve::{CurveKind, Label, ParamCurve};

/// Minimal SVG plot of planar curves: one polyline per branch, hot samples in red,
/// cool in blue, unlabelled in black. Caustics are long-dashed, Maxwell sets short-dashed,
/// level surfaces solid. Marked points are drawn as circles.
pub fn render_svg(curves: &[&ParamCurve], marks: &[[f64; 2]], width: u32, height: u32) -> String {
    let pts = curves
        .iter()
        .flat_map(|c| c.samples.iter().map(|s| (s.point[0], s.point[1])))
        .chain(marks.iter().map(|m| (m[0], m[1])))
        .filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1e-9);
    let (x0, x1, y0, y1) = (x0 - pad, x1 + pad, y0 - pad, y1 + pad);
    let (w, h) = (width as f64, height as f64);
    let map = |x: f64, y: f64| ((x - x0) / (x1 - x0) * w, h - (y - y0) / (y1 - y0) * h);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for c in curves {
        let dash = match c.kind {
            CurveKind::Caustic => "8,4",
            CurveKind::Maxwell | CurveKind::PreMaxwell => "3,3",
            CurveKind::LevelSurface => "",
        };
        for b in c.branches() {
            let samples = c.branch(b);
            // split into runs of equal colour
            let mut run: Vec<(f64, f64)> = Vec::new();
            let mut colour = "";
            for s in samples {
                let col = if s.labels.contains(&Label::Hot) {
                    "#c0392b"
                } else if s.labels.contains(&Label::Cool) {
                    "#2c6fbb"
                } else {
                    "#222222"
                };
                if col != colour && !run.is_empty() {
                    polyline(&mut out, &run, colour, dash);
                    run = run.last().copied().into_iter().collect();
                }
                colour = col;
                run.push(map(s.point[0], s.point[1]));
            }
            polyline(&mut out, &run, colour, dash);
        }
    }
    for m in marks {
        let (px, py) = map(m[0], m[1]);
        let _ = writeln!(out, r#"<circle cx="{px:.2}" cy="{py:.2}" r="3" fill="black"/>"#);
    }
    out.push_str("</svg>\n");
    out
}

fn polyline(out: &mut String, pts: &[(f64, f64)], colour: &str, dash: &str) {
    if pts.len() < 2 {
        return;
    }
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let dash = if dash.is_empty() { String::new() } else { format!(r#" stroke-dasharray="{dash}""#) };
    let _ = writeln!(out, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5"{dash} points="{}"/>"#, coords.join(" "));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::curve::{CurveKind, CurveSample};

    #[test]
    fn renders_polyline_and_marks() {
        let mut c = ParamCurve::new(CurveKind::Caustic, 1.0, 2);
        for i in 0..5 {
            let l = i as f64;
            c.samples.push(CurveSample { param: vec![l], point: vec![l, l * l], d1: vec![vec![1.0, 2.0 * l]], d2: vec![0.0, 2.0], branch: 0, preimage: vec![], labels: vec![Label::Cool] });
        }
        let svg = render_svg(&[&c], &[[0.0, 0.0]], 200, 100);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains(r#"stroke-dasharray="8,4""#));
        assert_eq!(svg.matches("<circle").count(), 1);
    }
}
