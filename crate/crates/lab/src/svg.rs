//! Minimal standalone SVG scatter plots.

use std::fmt::Write as _;
use std::path::Path;

use lvrae_core::Mat;

use crate::LabError;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 40.0;
const COLORS: [&str; 2] = ["#1f77b4", "#d62728"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn bounds(sets: &[&Mat]) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for m in sets {
        for r in m.row_iter() {
            if r[0].is_finite() && r[1].is_finite() {
                b.0 = b.0.min(r[0]);
                b.1 = b.1.max(r[0]);
                b.2 = b.2.min(r[1]);
                b.3 = b.3.max(r[1]);
            }
        }
    }
    if !b.0.is_finite() {
        return (-1.0, 1.0, -1.0, 1.0);
    }
    // pad degenerate spans so a single point still lands mid-plot
    let pad = |lo: f64, hi: f64| if hi - lo < 1e-12 { (lo - 1.0, hi + 1.0) } else { (lo, hi) };
    let (x0, x1) = pad(b.0, b.1);
    let (y0, y1) = pad(b.2, b.3);
    (x0, x1, y0, y1)
}

/// Renders two 2-D point sets (first two columns) with a legend.
pub fn scatter_svg(a: &Mat, b: &Mat, labels: [&str; 2], title: &str) -> String {
    let (x0, x1, y0, y1) = bounds(&[a, b]);
    let sx = (WIDTH - 2.0 * MARGIN) / (x1 - x0);
    let sy = (HEIGHT - 2.0 * MARGIN) / (y1 - y0);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="gray"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    for (k, m) in [a, b].into_iter().enumerate() {
        let _ = writeln!(s, r#"<g fill="{}" fill-opacity="0.6">"#, COLORS[k]);
        for r in m.row_iter() {
            if !(r[0].is_finite() && r[1].is_finite()) {
                continue;
            }
            let px = MARGIN + (r[0] - x0) * sx;
            let py = HEIGHT - MARGIN - (r[1] - y0) * sy;
            let _ = writeln!(s, r#"<circle cx="{px:.2}" cy="{py:.2}" r="1.8"/>"#);
        }
        let _ = writeln!(s, "</g>");
    }
    for (k, label) in labels.iter().enumerate() {
        let y = MARGIN + 14.0 + 18.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<circle cx="{}" cy="{}" r="5" fill="{}"/><text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            MARGIN + 12.0,
            y - 4.0,
            COLORS[k],
            MARGIN + 22.0,
            y,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn emit_scatter_svg(a: &Mat, b: &Mat, labels: [&str; 2], title: &str, path: &Path) -> Result<(), LabError> {
    if a.cols() < 2 || b.cols() < 2 {
        return Err(LabError::Format {
            path: path.display().to_string(),
            message: "scatter plots need at least two columns".into(),
        });
    }
    std::fs::write(path, scatter_svg(a, b, labels, title)).map_err(|e| LabError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_labels() {
        let e = Mat::zeros(0, 2);
        let s = scatter_svg(&e, &e, ["a<b", "c&d"], "\"t\"");
        assert!(s.contains("a&lt;b") && s.contains("c&amp;d") && s.contains("&quot;t&quot;"));
    }

    #[test]
    fn deterministic() {
        let a = Mat::from_vec(2, 2, vec![0.0, 1.0, 2.0, -1.0]).unwrap();
        let b = Mat::from_vec(1, 2, vec![0.5, 0.5]).unwrap();
        assert_eq!(scatter_svg(&a, &b, ["x", "y"], "t"), scatter_svg(&a, &b, ["x", "y"], "t"));
    }
}
