use num_complex::Complex64;

use super::{PointCloud, Polygon};

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Monotone-chain convex hull. Collinear points (relative tolerance
/// `1e-12·diameter`) are dropped, so degenerate input yields a segment or a
/// single point.
pub fn convex_hull(cloud: &PointCloud) -> Polygon {
    let mut pts: Vec<Complex64> = cloud.points().to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    let scale = cloud.extent();
    // height tolerance 1e-12·diameter times a base of at most the diameter
    let eps = 1e-12 * scale * scale;
    if pts.len() == 1 || scale == 0.0 {
        return Polygon::from_hull_vertices(vec![pts[0]]);
    }

    let mut lower: Vec<Complex64> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Complex64> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.pop();
    }
    Polygon::from_hull_vertices(lower)
}

fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

/// Whether `z` lies in the hull or within distance `tol` of it.
pub fn contains(hull: &Polygon, z: Complex64, tol: f64) -> bool {
    let v = hull.vertices();
    match v.len() {
        1 => (z - v[0]).norm() <= tol,
        2 => segment_distance(z, v[0], v[1]) <= tol,
        n => {
            let inside = (0..n).all(|i| cross(v[i], v[(i + 1) % n], z) >= 0.0);
            inside
                || (0..n)
                    .map(|i| segment_distance(z, v[i], v[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
                    <= tol
        }
    }
}
