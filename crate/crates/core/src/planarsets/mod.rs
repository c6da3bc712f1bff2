//! Non-empty compact planar sets represented as finite ε-nets.
//!
//! Every set-level predicate takes an explicit tolerance that should be at
//! least the resolution of the clouds involved.

mod grid;
mod hull;
mod limits;
mod metric;

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use grid::GridIndex;
pub use hull::{contains, convex_hull};
pub use limits::{
    hausdorff_cauchy_check, kuratowski_limits, kuratowski_limits_with_tail, ConvergenceReport,
    KuratowskiLimits,
};
pub use metric::{directed_hausdorff, hausdorff_distance, star_violation, StarViolation};

/// Finite multiset of complex numbers standing for a compact set, together
/// with the ε for which it is meant as an ε-net.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Complex64>,
    resolution: f64,
}

impl PointCloud {
    pub fn new(points: Vec<Complex64>, resolution: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("point cloud must be non-empty"));
        }
        if let Some(i) = points
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::domain(format!("point {i} is not finite")));
        }
        if !(resolution >= 0.0 && resolution.is_finite()) {
            return Err(Error::domain("resolution must be a finite non-negative real"));
        }
        Ok(PointCloud { points, resolution })
    }

    /// Cloud with resolution zero (an exact finite set).
    pub fn exact(points: Vec<Complex64>) -> Result<Self> {
        Self::new(points, 0.0)
    }

    pub fn singleton(z: Complex64) -> Self {
        PointCloud {
            points: vec![z],
            resolution: 0.0,
        }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Complex64> {
        self.points
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn with_resolution(mut self, resolution: f64) -> Self {
        self.resolution = resolution.max(0.0);
        self
    }

    pub fn with_point(mut self, z: Complex64) -> Result<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::domain("added point is not finite"));
        }
        self.points.push(z);
        Ok(self)
    }

    /// Union of two clouds; the coarser resolution wins.
    pub fn union(&self, other: &PointCloud) -> PointCloud {
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        PointCloud {
            points,
            resolution: self.resolution.max(other.resolution),
        }
    }

    /// Axis-aligned bounds `(min_re, min_im, max_re, max_im)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.points.iter().fold(
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), z| (a.min(z.re), b.min(z.im), c.max(z.re), d.max(z.im)),
        )
    }

    /// Diagonal length of the bounding box, an upper bound for the diameter.
    pub fn extent(&self) -> f64 {
        let (x0, y0, x1, y1) = self.bounds();
        (x1 - x0).hypot(y1 - y0)
    }

    pub fn max_modulus(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest nearest-neighbour distance between distinct points; zero for a
    /// cloud with a single distinct point.
    pub fn nn_spacing(&self) -> f64 {
        let mut distinct = self.points.clone();
        distinct.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        distinct.dedup();
        if distinct.len() < 2 {
            return 0.0;
        }
        let index = GridIndex::new(&distinct);
        distinct
            .iter()
            .enumerate()
            .map(|(i, &z)| index.nearest_excluding(z, i).1)
            .fold(0.0, f64::max)
    }

    /// Cloud as CSV with header `re,im`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_points_csv(&self.points, writer)
    }

    pub fn read_csv<R: Read>(reader: R, resolution: f64) -> Result<Self> {
        Self::new(read_points_csv(reader)?, resolution)
    }
}

/// Convex polygon with counter-clockwise vertices in strictly convex
/// position. One vertex encodes a point, two a segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    vertices: Vec<Complex64>,
}

impl Polygon {
    /// Polygon spanned by the given points (their convex hull).
    pub fn hull_of(points: &[Complex64]) -> Result<Self> {
        Ok(convex_hull(&PointCloud::exact(points.to_vec())?))
    }

    pub(crate) fn from_hull_vertices(vertices: Vec<Complex64>) -> Self {
        Polygon { vertices }
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn is_point(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn is_segment(&self) -> bool {
        self.vertices.len() == 2
    }

    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        0.5 * (0..v.len())
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % v.len()]);
                a.re * b.im - a.im * b.re
            })
            .sum::<f64>()
    }

    pub fn to_cloud(&self) -> PointCloud {
        PointCloud {
            points: self.vertices.clone(),
            resolution: 0.0,
        }
    }

    /// Points on the boundary spaced at most `step` apart, vertices included.
    pub fn boundary_samples(&self, step: f64) -> Vec<Complex64> {
        let v = &self.vertices;
        if v.len() == 1 {
            return v.clone();
        }
        let edges = if v.len() == 2 { 1 } else { v.len() };
        let mut out = Vec::new();
        for i in 0..edges {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            let m = ((b - a).norm() / step).ceil().max(1.0) as usize;
            for k in 0..m {
                out.push(a + (b - a) * (k as f64 / m as f64));
            }
        }
        if v.len() == 2 {
            out.push(v[1]);
        }
        out
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_points_csv(&self.vertices, writer)
    }

    /// Reads vertices and re-hulls them so the invariants hold.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        Polygon::hull_of(&read_points_csv(reader)?)
    }
}

fn write_points_csv<W: Write>(points: &[Complex64], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["re", "im"])?;
    for z in points {
        w.write_record([format!("{:.17e}", z.re), format!("{:.17e}", z.im)])?;
    }
    w.flush()?;
    Ok(())
}

fn read_points_csv<R: Read>(reader: R) -> Result<Vec<Complex64>> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "re" || &headers[1] != "im" {
        return Err(Error::Input(format!(
            "expected CSV header `re,im`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut points = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let parse = |k: usize| -> Result<f64> {
            record
                .get(k)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Input(format!("bad number on CSV line {}", line + 2)))
        };
        points.push(Complex64::new(parse(0)?, parse(1)?));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(PointCloud::exact(vec![]).is_err());
        assert!(PointCloud::exact(vec![c(f64::NAN, 0.0)]).is_err());
        assert!(PointCloud::new(vec![c(0.0, 0.0)], -1.0).is_err());
    }

    #[test]
    fn csv_keeps_full_precision() {
        let cloud = PointCloud::exact(vec![c(1.0 / 3.0, -2.0_f64.sqrt()), c(1e-300, 7.0)]).unwrap();
        let mut buf = Vec::new();
        cloud.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("re,im\n"));
        let back = PointCloud::read_csv(buf.as_slice(), 0.0).unwrap();
        assert_eq!(back, cloud);
    }

    #[test]
    fn csv_rejects_wrong_header() {
        assert!(PointCloud::read_csv("x,y\n1,2\n".as_bytes(), 0.0).is_err());
    }

    #[test]
    fn nn_spacing_of_regular_net() {
        let cloud = PointCloud::exact((0..=10).map(|k| c(k as f64 * 0.1, 0.0)).collect()).unwrap();
        assert!((cloud.nn_spacing() - 0.1).abs() < 1e-12);
        assert_eq!(PointCloud::singleton(c(1.0, 1.0)).nn_spacing(), 0.0);
    }

    #[test]
    fn boundary_samples_cover_triangle() {
        let tri = Polygon::hull_of(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let samples = tri.boundary_samples(0.1);
        assert!(samples.len() >= 30);
        assert!(samples.iter().all(|&z| contains(&tri, z, 1e-12)));
    }
}
