use num_complex::Complex64;
use rayon::prelude::*;

use super::{GridIndex, PointCloud};
use crate::error::{Error, Result};

/// `max_{z∈a} min_{w∈b} |z − w|`.
pub fn directed_hausdorff(a: &PointCloud, b: &PointCloud) -> f64 {
    let index = GridIndex::new(b.points());
    a.points()
        .par_iter()
        .map(|&z| index.distance(z))
        .reduce(|| 0.0, f64::max)
}

/// Hausdorff distance between two finite clouds.
pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

/// A point on a segment `[center, target]` that is farther than the
/// tolerance from the cloud.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarViolation {
    pub target: Complex64,
    pub point: Complex64,
    /// Position along the segment, `point = center + t·(target − center)`.
    pub t: f64,
    pub distance: f64,
}

/// Tests whether the cloud is star-shaped with respect to `center` at
/// tolerance `tol`.
///
/// Every segment `[center, p]` is sampled at steps of at most `tol / 2`;
/// targets are visited in order of angle then radius around the center, and
/// the first sample farther than `tol` from the cloud is returned.
pub fn star_violation(
    a: &PointCloud,
    center: Complex64,
    tol: f64,
) -> Result<Option<StarViolation>> {
    if !(tol > 0.0) || tol < a.resolution() {
        return Err(Error::domain(format!(
            "star tolerance {tol} must be positive and at least the cloud resolution {}",
            a.resolution()
        )));
    }
    let index = GridIndex::new(a.points());
    let mut targets: Vec<Complex64> = a.points().to_vec();
    targets.sort_by(|p, q| {
        let (dp, dq) = (p - center, q - center);
        dp.arg()
            .total_cmp(&dq.arg())
            .then(dp.norm().total_cmp(&dq.norm()))
    });
    targets.dedup();

    let first = targets.par_iter().enumerate().find_map_first(|(_, &p)| {
        let len = (p - center).norm();
        let steps = (len / (0.5 * tol)).ceil().max(1.0) as usize;
        (0..=steps).find_map(|k| {
            let t = k as f64 / steps as f64;
            let z = center + (p - center) * t;
            if index.any_within(z, tol) {
                None
            } else {
                Some(StarViolation {
                    target: p,
                    point: z,
                    t,
                    distance: index.distance(z),
                })
            }
        })
    });
    Ok(first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use std::f64::consts::PI;

    fn cloud(points: &[Complex64]) -> PointCloud {
        PointCloud::exact(points.to_vec()).unwrap()
    }

    #[test]
    fn hausdorff_examples() {
        let zero = cloud(&[c(0.0, 0.0)]);
        let one = cloud(&[c(1.0, 0.0)]);
        assert_eq!(hausdorff_distance(&zero, &zero), 0.0);
        assert_eq!(hausdorff_distance(&zero, &one), 1.0);
        assert_eq!(hausdorff_distance(&cloud(&[c(0.0, 0.0), c(1.0, 0.0)]), &zero), 1.0);
    }

    fn interval_net(eps: f64) -> PointCloud {
        let n = (1.0 / eps).ceil() as usize;
        PointCloud::new((0..=n).map(|k| c(k as f64 / n as f64, 0.0)).collect(), eps).unwrap()
    }

    #[test]
    fn interval_is_star_shaped_at_endpoint() {
        let eps = 0.01;
        assert_eq!(star_violation(&interval_net(eps), c(0.0, 0.0), 2.0 * eps).unwrap(), None);
    }

    #[test]
    fn circle_is_not_star_shaped_at_origin() {
        let eps = 0.01;
        let n = (2.0 * PI / eps).ceil() as usize;
        let circle = PointCloud::new(
            (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect(),
            eps,
        )
        .unwrap();
        let v = star_violation(&circle, c(0.0, 0.0), 2.0 * eps).unwrap().expect("violation");
        assert!(v.point.norm() < 1.0 - 2.0 * eps);
        assert!(v.distance > 2.0 * eps);
        // with the center added the worst gap along a radius sits at |z| = 1/2
        let with_center = circle.with_point(c(0.0, 0.0)).unwrap();
        let v = star_violation(&with_center, c(0.0, 0.0), 2.0 * eps).unwrap().expect("violation");
        assert!(v.point.norm() > 2.0 * eps && v.point.norm() < 1.0 - 2.0 * eps);
    }

    #[test]
    fn disk_is_star_shaped_near_its_boundary() {
        let eps: f64 = 0.02;
        let mut pts = Vec::new();
        let m = (1.0 / eps).ceil() as i64;
        for i in -m..=m {
            for j in -m..=m {
                let z = c(i as f64 * eps, j as f64 * eps);
                if z.norm() <= 1.0 {
                    pts.push(z);
                }
            }
        }
        let disk = PointCloud::new(pts, eps).unwrap();
        assert_eq!(star_violation(&disk, c(0.99, 0.0), 2.0 * eps).unwrap(), None);
    }

    #[test]
    fn tolerance_below_resolution_is_rejected() {
        assert!(star_violation(&interval_net(0.1), c(0.0, 0.0), 0.05).is_err());
    }
}
