use itertools::Itertools;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::substream;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, is_square, CMat};
use crate::matching::bottleneck_matching;
use crate::planarsets::PointCloud;

/// Largest size for which all `n!` pairings are enumerated.
pub const EXHAUSTIVE_LIMIT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SpectrumMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

/// Permutation-pairing sums `Σ_j γ_j τ_{σ(j)}` of two eigenvalue lists.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSet {
    pub points: PointCloud,
    pub mode: SpectrumMode,
    pub n: usize,
}

/// `Σ_j γ_j τ_{σ(j)}`.
pub fn permutation_sum(gamma: &[Complex64], tau: &[Complex64], sigma: &[usize]) -> Complex64 {
    gamma.iter().zip(sigma).map(|(g, &s)| g * tau[s]).sum()
}

/// Removes points within `tol` of an earlier kept point.
pub fn dedupe_points(mut points: Vec<Complex64>, tol: f64) -> Vec<Complex64> {
    points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut kept: Vec<Complex64> = Vec::with_capacity(points.len());
    for z in points {
        let duplicate = kept
            .iter()
            .rev()
            .take_while(|k| k.re >= z.re - tol)
            .any(|k| (k - z).norm() <= tol);
        if !duplicate {
            kept.push(z);
        }
    }
    kept
}

/// The C-spectrum of a pair of diagonalizable matrices given by their
/// eigenvalue lists, over all permutations or a random sample of them.
pub fn c_spectrum_matrix(c_eigs: &[Complex64], t_eigs: &[Complex64], mode: SpectrumMode) -> Result<SpectrumSet> {
    let n = c_eigs.len();
    if n != t_eigs.len() {
        return Err(Error::size(format!(
            "eigenvalue lists have lengths {n} and {}",
            t_eigs.len()
        )));
    }
    if n == 0 {
        return Err(Error::size("eigenvalue lists must be non-empty"));
    }
    let raw: Vec<Complex64> = match mode {
        SpectrumMode::Exhaustive => {
            if n > EXHAUSTIVE_LIMIT {
                return Err(Error::domain(format!(
                    "exhaustive C-spectrum limited to n ≤ {EXHAUSTIVE_LIMIT}, got {n}"
                )));
            }
            (0..n)
                .permutations(n)
                .par_bridge()
                .map(|sigma| permutation_sum(c_eigs, t_eigs, &sigma))
                .collect()
        }
        SpectrumMode::Sampled { count, seed } => {
            if count == 0 {
                return Err(Error::domain("sample count must be ≥ 1"));
            }
            const CHUNK: usize = 1024;
            (0..count.div_ceil(CHUNK))
                .into_par_iter()
                .flat_map_iter(|b| {
                    let mut rng = substream(seed, b as u64 + 1);
                    let mut sigma: Vec<usize> = (0..n).collect();
                    (0..CHUNK.min(count - b * CHUNK))
                        .map(|_| {
                            sigma.shuffle(&mut rng);
                            permutation_sum(c_eigs, t_eigs, &sigma)
                        })
                        .collect::<Vec<_>>()
                })
                .collect()
        }
    };
    let points = PointCloud::exact(dedupe_points(raw, 1e-12))?;
    let points = match mode {
        SpectrumMode::Exhaustive => points,
        SpectrumMode::Sampled { .. } => {
            let r = points.nn_spacing();
            points.with_resolution(r)
        }
    };
    Ok(SpectrumSet { points, mode, n })
}

/// Spectrum of a triangular matrix read off its diagonal, with the
/// bottleneck matching distance to the dense eigensolver's eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularSpectrum {
    pub values: Vec<Complex64>,
    pub eigensolver_distance: f64,
}

pub fn triangular_spectrum(m: &CMat, tol: f64) -> Result<TriangularSpectrum> {
    if !is_square(m) {
        return Err(Error::size("triangular_spectrum needs a square matrix"));
    }
    let n = m.nrows();
    let below = (0..n).flat_map(|i| (0..i).map(move |j| (i, j)));
    let lower_mass = below.clone().map(|(i, j)| m[(i, j)].norm()).fold(0.0, f64::max);
    let upper_mass = below.map(|(i, j)| m[(j, i)].norm()).fold(0.0, f64::max);
    if lower_mass > tol && upper_mass > tol {
        return Err(Error::domain(format!(
            "matrix is neither upper nor lower triangular to {tol:e}"
        )));
    }
    let values: Vec<Complex64> = m.diagonal().iter().cloned().collect();
    let eig = eigenvalues(m)?;
    let costs: Vec<Vec<f64>> = values
        .iter()
        .map(|d| eig.iter().map(|e| (d - e).norm()).collect())
        .collect();
    let eigensolver_distance = if n == 0 {
        0.0
    } else {
        bottleneck_matching(&costs).map_or(f64::INFINITY, |(_, d)| d)
    };
    Ok(TriangularSpectrum {
        values,
        eigensolver_distance,
    })
}

impl SpectrumSet {
    /// Whether `z` is one of the points up to `tol`.
    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.points.points().iter().any(|p| (p - z).norm() <= tol)
    }
}
