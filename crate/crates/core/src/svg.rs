//! Minimal static SVG plots.

use std::fmt::Write;

use num_complex::Complex64;

const W: f64 = 480.0;
const H: f64 = 480.0;
const PAD: f64 = 32.0;

struct Frame {
    x0: f64,
    y0: f64,
    span: f64,
}

impl Frame {
    fn fit(xs: impl Iterator<Item = (f64, f64)>) -> Self {
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in xs {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
        let span = (xmax - xmin).max(ymax - ymin).max(f64::MIN_POSITIVE);
        Self { x0: 0.5 * (xmin + xmax) - span / 2.0, y0: 0.5 * (ymin + ymax) - span / 2.0, span }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (PAD + (x - self.x0) / self.span * (W - 2.0 * PAD), H - PAD - (y - self.y0) / self.span * (H - 2.0 * PAD))
    }
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<text x=\"{PAD}\" y=\"20\" font-family=\"monospace\" font-size=\"12\">{}</text>\n",
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A closed image loop with the target point marked.
pub fn loop_svg(points: &[Complex64], target: Complex64, title: &str) -> String {
    let f = Frame::fit(points.iter().chain(std::iter::once(&target)).map(|z| (z.re, z.im)));
    let mut s = header(title);
    let mut path = String::new();
    for (k, z) in points.iter().enumerate() {
        let (x, y) = f.px(z.re, z.im);
        let _ = write!(path, "{}{x:.2},{y:.2} ", if k == 0 { "M" } else { "L" });
    }
    path.push('Z');
    let _ = writeln!(s, "<path d=\"{path}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1\"/>");
    let (tx, ty) = f.px(target.re, target.im);
    let _ = writeln!(s, "<circle cx=\"{tx:.2}\" cy=\"{ty:.2}\" r=\"4\" fill=\"crimson\"/>");
    s.push_str("</svg>\n");
    s
}

/// `log₁₀ y` against `log₁₀ x` as points joined by a line.
pub fn loglog_svg(data: &[(f64, f64)], title: &str) -> String {
    let logs: Vec<(f64, f64)> = data.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.log10(), p.1.log10())).collect();
    let mut s = header(title);
    if logs.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let f = Frame::fit(logs.iter().copied());
    let pts: Vec<String> = logs
        .iter()
        .map(|&(x, y)| {
            let (px, py) = f.px(x, y);
            format!("{px:.2},{py:.2}")
        })
        .collect();
    let _ = writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"black\"/>", pts.join(" "));
    for p in &pts {
        let (x, y) = p.split_once(',').expect("formatted pair");
        let _ = writeln!(s, "<circle cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"black\"/>");
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_formed() {
        let pts: Vec<Complex64> = (0..8).map(|k| Complex64::from_polar(1.0, k as f64)).collect();
        let s = loop_svg(&pts, Complex64::new(0.0, 0.0), "a < b");
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("a &lt; b"));
        let s = loglog_svg(&[(1.0, 2.0), (10.0, 4.0)], "dim");
        assert_eq!(s.matches("<circle").count(), 2);
    }
}
