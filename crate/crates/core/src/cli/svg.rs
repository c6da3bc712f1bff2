use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::output::write_atomic;
use crate::error::{Error, Result};
use crate::planarsets::{PointCloud, Polygon};

const CANVAS: f64 = 600.0;

/// Scatter plot of a cloud with an optional hull and star centers.
///
/// The view box is the data bounding box plus a 5% margin; coordinates are
/// printed with a fixed number of decimals, so equal inputs give equal bytes.
pub fn render_svg(cloud: &PointCloud, hull: Option<&Polygon>, centers: &[Complex64]) -> Result<String> {
    if cloud.is_empty() {
        return Err(Error::Input("cannot plot an empty cloud".into()));
    }
    let mut all: Vec<Complex64> = cloud.points().to_vec();
    if let Some(h) = hull {
        all.extend_from_slice(h.vertices());
    }
    all.extend_from_slice(centers);
    let (x0, y0, x1, y1) = all.iter().fold(
        (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), z| (a.min(z.re), b.min(z.im), c.max(z.re), d.max(z.im)),
    );
    let span = (x1 - x0).max(y1 - y0);
    let span = if span > 0.0 { span } else { 1.0 };
    let scale = CANVAS / span;
    let margin = 0.05 * span * scale;
    let width = (x1 - x0) * scale + 2.0 * margin;
    let height = (y1 - y0) * scale + 2.0 * margin;
    let px = |z: Complex64| ((z.re - x0) * scale + margin, (y1 - z.im) * scale + margin);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width:.3} {height:.3}" width="{width:.3}" height="{height:.3}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{width:.3}" height="{height:.3}" fill="white"/>"#);
    if let Some(h) = hull {
        let pts: Vec<String> = h
            .vertices()
            .iter()
            .map(|&z| {
                let (x, y) = px(z);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            out,
            r##"<polygon points="{}" fill="none" stroke="#1f5fa8" stroke-width="1"/>"##,
            pts.join(" ")
        );
    }
    let _ = writeln!(out, r##"<g fill="#c0392b">"##);
    for &z in cloud.points() {
        let (x, y) = px(z);
        let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="1.5"/>"#);
    }
    let _ = writeln!(out, "</g>");
    if !centers.is_empty() {
        let _ = writeln!(out, r##"<g stroke="#117a43" stroke-width="1.5">"##);
        for &z in centers {
            let (x, y) = px(z);
            let _ = writeln!(
                out,
                r#"<path d="M{:.3},{:.3}L{:.3},{:.3}M{:.3},{:.3}L{:.3},{:.3}"/>"#,
                x - 5.0,
                y - 5.0,
                x + 5.0,
                y + 5.0,
                x - 5.0,
                y + 5.0,
                x + 5.0,
                y - 5.0
            );
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_svg(cloud: &PointCloud, hull: Option<&Polygon>, centers: &[Complex64], path: &Path) -> Result<()> {
    write_atomic(path, render_svg(cloud, hull, centers)?.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn singleton_plot_has_one_dot() {
        let svg = render_svg(&PointCloud::singleton(c(1.0, 2.0)), None, &[]).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn output_is_deterministic() {
        let cloud = PointCloud::exact(vec![c(0.0, 0.0), c(1.0, 0.5), c(0.3, -0.2)]).unwrap();
        let hull = Polygon::hull_of(cloud.points()).unwrap();
        let a = render_svg(&cloud, Some(&hull), &[c(0.4, 0.1)]).unwrap();
        let b = render_svg(&cloud, Some(&hull), &[c(0.4, 0.1)]).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("<polygon"));
        assert!(a.contains("<path"));
    }
}
