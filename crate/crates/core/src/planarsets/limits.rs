use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{hausdorff_distance, GridIndex, PointCloud};
use crate::error::{Error, Result};

const MAX_GRID_POINTS: usize = 4_000_000;

/// Grid approximations of the Kuratowski lower and upper limits of a
/// sequence of clouds. `None` flags an empty limit at this resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct KuratowskiLimits {
    pub liminf: Option<PointCloud>,
    pub limsup: Option<PointCloud>,
    /// First (0-based) index of the tail standing in for "all large n".
    pub tail_start: usize,
}

/// Kuratowski limits on a square grid of pitch `eps`, with the tail starting
/// at `ceil(len / 4)`.
pub fn kuratowski_limits(seq: &[PointCloud], eps: f64) -> Result<KuratowskiLimits> {
    kuratowski_limits_with_tail(seq, eps, seq.len().div_ceil(4))
}

/// Kuratowski limits where "all but finitely many" means every index
/// `n ≥ tail_start` and "infinitely many" means some index in that tail.
pub fn kuratowski_limits_with_tail(
    seq: &[PointCloud],
    eps: f64,
    tail_start: usize,
) -> Result<KuratowskiLimits> {
    if seq.is_empty() {
        return Err(Error::domain("Kuratowski limits of an empty sequence"));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::domain("grid pitch must be positive"));
    }
    let tail_start = tail_start.min(seq.len() - 1);
    let (mut x0, mut y0, mut x1, mut y1) = seq[0].bounds();
    for cloud in &seq[1..] {
        let (a, b, c, d) = cloud.bounds();
        x0 = x0.min(a);
        y0 = y0.min(b);
        x1 = x1.max(c);
        y1 = y1.max(d);
    }
    let nx = ((x1 - x0) / eps).ceil() as usize + 3;
    let ny = ((y1 - y0) / eps).ceil() as usize + 3;
    if nx.saturating_mul(ny) > MAX_GRID_POINTS {
        return Err(Error::domain(format!(
            "union of the clouds is too large for grid pitch {eps} ({nx}×{ny} nodes)"
        )));
    }
    // snap the grid to multiples of eps so limits do not depend on the data offset
    let gx0 = ((x0 / eps).floor() - 1.0) * eps;
    let gy0 = ((y0 / eps).floor() - 1.0) * eps;

    let tail: Vec<GridIndex> = seq[tail_start..]
        .iter()
        .map(|cloud| GridIndex::new(cloud.points()))
        .collect();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let g = Complex64::new(gx0 + i as f64 * eps, gy0 + j as f64 * eps);
            let hits = tail.iter().filter(|index| index.any_within(g, eps)).count();
            if hits == tail.len() {
                lower.push(g);
            }
            if hits > 0 {
                upper.push(g);
            }
        }
    }
    let wrap = |pts: Vec<Complex64>| {
        if pts.is_empty() {
            None
        } else {
            Some(PointCloud::new(pts, eps).expect("finite grid nodes"))
        }
    };
    Ok(KuratowskiLimits {
        liminf: wrap(lower),
        limsup: wrap(upper),
        tail_start,
    })
}

/// Consecutive Hausdorff distances of a sequence of clouds and a Cauchy
/// verdict at a tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// `distances[k] = Δ(A_k, A_{k+1})`.
    pub distances: Vec<f64>,
    pub tol: f64,
    /// Smallest `k` from which every later consecutive distance is below `tol`.
    pub converged_from: Option<usize>,
    pub converged: bool,
    /// `Δ(liminf, limsup)` of the Kuratowski grids at pitch `max(tol, resolution)`;
    /// a small gap corroborates the Hausdorff verdict.
    pub kuratowski_gap: Option<f64>,
}

pub fn hausdorff_cauchy_check(seq: &[PointCloud], tol: f64) -> Result<ConvergenceReport> {
    if seq.len() < 2 {
        return Err(Error::domain("a Cauchy check needs at least two clouds"));
    }
    let distances: Vec<f64> = seq
        .windows(2)
        .map(|w| hausdorff_distance(&w[0], &w[1]))
        .collect();
    let converged_from = distances
        .iter()
        .rposition(|&d| d >= tol)
        .map_or(Some(0), |k| (k + 1 < distances.len()).then_some(k + 1));
    let resolution = seq.iter().map(PointCloud::resolution).fold(0.0, f64::max);
    let kuratowski_gap = kuratowski_limits(seq, tol.max(resolution))
        .ok()
        .and_then(|lim| match (lim.liminf, lim.limsup) {
            (Some(lo), Some(hi)) => Some(hausdorff_distance(&lo, &hi)),
            _ => None,
        });
    Ok(ConvergenceReport {
        converged: converged_from.is_some(),
        distances,
        tol,
        converged_from,
        kuratowski_gap,
    })
}
