//! Finite-dimensional engines: Haar sampling of `W_C(A)`, support-function
//! boundaries in the convex cases, C-spectra, triangular spectra and
//! Birkhoff certificates.

mod birkhoff;
mod spectrum;
mod support;

use itertools::Itertools;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    is_normal, is_square, normal_eig, op_norm, permutation_matrix, trace, trace_of_product,
    unitarity_defect, CMat, ZERO,
};
use crate::opmodel::trace_norm;
use crate::planarsets::{contains, PointCloud, Polygon};

pub use birkhoff::{birkhoff_decompose, unistochastic, wc_birkhoff_certificate, BirkhoffCertificate, CertificateTerm};
pub use spectrum::{
    c_spectrum_matrix, dedupe_points, permutation_sum, triangular_spectrum, SpectrumMode, SpectrumSet,
    TriangularSpectrum, EXHAUSTIVE_LIMIT,
};
pub use support::{boundary_hull, collinear_line, convex_frame, support_value, ConvexFrame};

/// Permutations are enumerated exhaustively up to this size in range sampling.
const ALL_PERMUTATIONS_UP_TO: usize = 6;
const SAMPLED_PERMUTATIONS: usize = 720;
const CHUNK: usize = 64;

/// Random generator for the substream `stream` of `seed`, so parallel workers
/// reproduce the same numbers regardless of scheduling.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Haar-distributed unitary from the QR factorization of a complex Gaussian
/// matrix, with the diagonal of `R` rotated onto the non-negative reals.
pub fn haar_unitary(n: usize, seed: u64) -> CMat {
    haar_unitary_with(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn haar_unitary_with<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    assert!(n >= 1, "unitary size must be ≥ 1");
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = CMat::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re * scale, im * scale)
    });
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn check_pair(c: &CMat, a: &CMat) -> Result<()> {
    if !is_square(c) || !is_square(a) || c.nrows() != a.nrows() {
        return Err(Error::size(format!(
            "C is {}×{} and A is {}×{}; both must be square of equal size",
            c.nrows(),
            c.ncols(),
            a.nrows(),
            a.ncols()
        )));
    }
    if c.nrows() == 0 {
        return Err(Error::size("matrices must be at least 1×1"));
    }
    Ok(())
}

/// `tr(C U† A U)`.
pub fn wc_point(c: &CMat, a: &CMat, u: &CMat) -> Result<Complex64> {
    check_pair(c, a)?;
    if u.nrows() != c.nrows() || !is_square(u) {
        return Err(Error::size("U must be square of the same size as C"));
    }
    if unitarity_defect(u) > 1e-10 {
        return Err(Error::domain("U is not unitary to 1e-10"));
    }
    Ok(wc_unchecked(c, a, u))
}

pub(crate) fn wc_unchecked(c: &CMat, a: &CMat, u: &CMat) -> Complex64 {
    let au = a * u;
    trace_of_product(c, &(u.adjoint() * au))
}

/// `tr(C P† A P)` for the permutation unitary `P e_i = e_{σ(i)}`.
pub(crate) fn wc_permutation(c: &CMat, a: &CMat, sigma: &[usize]) -> Complex64 {
    let n = sigma.len();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += c[(i, j)] * a[(sigma[j], sigma[i])];
        }
    }
    acc
}

/// Values of `tr(C U(t)† A U(t))` along the unitary geodesic from `u0` to
/// `u1`, at `O(n²)` cost per parameter.
pub fn geodesic_values(c: &CMat, a: &CMat, u0: &CMat, u1: &CMat, ts: &[f64]) -> Result<Vec<Complex64>> {
    check_pair(c, a)?;
    let (lambda, q) = normal_eig(&(u0.adjoint() * u1))?;
    let theta: Vec<f64> = lambda.iter().map(|l| l.arg()).collect();
    let ct = q.adjoint() * c * &q;
    let w = u0 * &q;
    let at = w.adjoint() * a * &w;
    let n = theta.len();
    Ok(ts
        .iter()
        .map(|&t| {
            let mut acc = ZERO;
            for k in 0..n {
                for l in 0..n {
                    acc += ct[(k, l)] * at[(l, k)] * Complex64::from_polar(1.0, t * (theta[k] - theta[l]));
                }
            }
            acc
        })
        .collect())
}

/// Approximation of `W_C(A)` by attained values.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeEstimate {
    /// Values `tr(C U† A U)` at the sampled and deterministic unitaries.
    pub inner: PointCloud,
    /// Outer polygon from the support function, when a convexity
    /// hypothesis holds.
    pub outer: Option<Polygon>,
    pub star_centers: Vec<Complex64>,
    /// `ν₁(C)·‖A‖`, a bound on every value.
    pub bound_radius: f64,
    pub seed: u64,
    /// Number of Haar samples.
    pub count: usize,
}

/// Haar samples plus the values at `U = I`, at permutation matrices (all of
/// them for `n ≤ 6`, otherwise 720 random ones) and, when `C` and `A` are
/// normal, at the unitaries pairing their eigenvectors.
pub fn sample_range(c: &CMat, a: &CMat, count: usize, seed: u64) -> Result<RangeEstimate> {
    check_pair(c, a)?;
    if count == 0 {
        return Err(Error::domain("sample count must be ≥ 1"));
    }
    let n = c.nrows();
    let mut points = haar_values(c, a, count, seed);
    points.push(trace_of_product(c, a));

    let perms = permutation_list(n, seed);
    points.extend(perms.iter().map(|sigma| wc_permutation(c, a, sigma)));
    if is_normal(c, 1e-10) && is_normal(a, 1e-10) {
        let (gamma, _) = normal_eig(c)?;
        let (alpha, _) = normal_eig(a)?;
        points.extend(perms.iter().map(|sigma| permutation_sum(&gamma, &alpha, sigma)));
    }
    finish_estimate(c, a, points, seed, count)
}

fn finish_estimate(c: &CMat, a: &CMat, points: Vec<Complex64>, seed: u64, count: usize) -> Result<RangeEstimate> {
    let n = c.nrows();
    let cloud = PointCloud::exact(points)?;
    let resolution = cloud.nn_spacing();
    Ok(RangeEstimate {
        inner: cloud.with_resolution(resolution),
        outer: None,
        star_centers: vec![trace(c) * trace(a) / n as f64],
        bound_radius: trace_norm(c)? * op_norm(a),
        seed,
        count,
    })
}

fn haar_values(c: &CMat, a: &CMat, count: usize, seed: u64) -> Vec<Complex64> {
    let n = c.nrows();
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = substream(seed, b as u64 + 1);
            let len = CHUNK.min(count - b * CHUNK);
            (0..len)
                .map(|_| wc_unchecked(c, a, &haar_unitary_with(n, &mut rng)))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Haar unitaries from one dedicated substream.
fn haar_list(n: usize, count: usize, seed: u64, stream: u64) -> Vec<CMat> {
    let mut rng = substream(seed, stream);
    (0..count).map(|_| haar_unitary_with(n, &mut rng)).collect()
}

/// All permutations of `0..n` for small `n`, otherwise a fixed number of
/// Fisher–Yates shuffles; the identity and the reversal are always present.
pub(crate) fn permutation_list(n: usize, seed: u64) -> Vec<Vec<usize>> {
    if n <= ALL_PERMUTATIONS_UP_TO {
        return (0..n).permutations(n).collect();
    }
    let mut rng = substream(seed, 0);
    let mut out = vec![(0..n).collect::<Vec<_>>(), (0..n).rev().collect()];
    for _ in 0..SAMPLED_PERMUTATIONS - 2 {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut rng);
        out.push(p);
    }
    out
}

/// Options for [`estimate_range`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeOptions {
    pub count: usize,
    pub seed: u64,
    /// Angle grid for the support function.
    pub angles: usize,
    /// Number of unitary geodesics sampled between Haar unitaries and the
    /// extremal unitaries.
    pub bridges: usize,
    pub bridge_steps: usize,
    /// Pitch divisor of the grid filling the hull of attained values; only
    /// used when the range is known to be convex.
    pub fill: Option<usize>,
}

impl Default for RangeOptions {
    fn default() -> Self {
        RangeOptions {
            count: 2000,
            seed: 0,
            angles: 720,
            bridges: 64,
            bridge_steps: 24,
            fill: None,
        }
    }
}

/// [`sample_range`] plus the outer support polygon and the attained
/// boundary points when a convexity hypothesis holds, values along unitary
/// geodesics towards extremal unitaries, and optionally a grid filling the
/// hull of the attained values in the convex case.
pub fn estimate_range(c: &CMat, a: &CMat, opts: &RangeOptions) -> Result<RangeEstimate> {
    let base = sample_range(c, a, opts.count, opts.seed)?;
    let n = c.nrows();
    let mut points = base.inner.points().to_vec();

    let frame = convex_frame(c, a);
    let mut extremal: Vec<CMat> = Vec::new();
    let mut outer = None;
    if let Some(frame) = &frame {
        if opts.angles < 3 {
            return Err(Error::domain("angle grid needs at least 3 angles"));
        }
        outer = Some(frame.boundary_polygon(opts.angles));
        for k in 0..opts.angles {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / opts.angles as f64;
            let u = frame.maximizer(theta);
            points.push(wc_unchecked(c, a, &u));
            extremal.push(u);
        }
    } else {
        let perms = permutation_list(n, opts.seed);
        extremal.extend(perms.iter().map(|p| permutation_matrix(p)));
        if is_normal(c, 1e-10) && is_normal(a, 1e-10) {
            let (_, vc) = normal_eig(c)?;
            let (_, va) = normal_eig(a)?;
            extremal.extend(perms.iter().map(|p| &va * permutation_matrix(p) * vc.adjoint()));
        }
    }

    if opts.bridges > 0 && !extremal.is_empty() && opts.bridge_steps > 0 {
        let picks: Vec<usize> = (0..opts.bridges.min(extremal.len()))
            .map(|k| k * extremal.len() / opts.bridges.min(extremal.len()))
            .collect();
        let starts = haar_list(n, picks.len(), opts.seed, u64::MAX);
        let ts: Vec<f64> = (1..opts.bridge_steps).map(|k| k as f64 / opts.bridge_steps as f64).collect();
        let bridged: Vec<Vec<Complex64>> = picks
            .par_iter()
            .zip(starts.par_iter())
            .map(|(&k, u0)| geodesic_values(c, a, u0, &extremal[k], &ts))
            .collect::<Result<_>>()?;
        points.extend(bridged.into_iter().flatten());
    }

    if let (Some(divisor), Some(_)) = (opts.fill, &frame) {
        points.extend(convex_fill(&points, divisor)?);
    }

    let mut est = finish_estimate(c, a, points, opts.seed, opts.count)?;
    est.outer = outer;
    Ok(est)
}

/// Grid points and boundary samples of the hull of `points`, at pitch
/// `extent / divisor`.
fn convex_fill(points: &[Complex64], divisor: usize) -> Result<Vec<Complex64>> {
    let cloud = PointCloud::exact(points.to_vec())?;
    let extent = cloud.extent();
    let magnitude = points.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if extent <= 1e-12 * magnitude.max(1.0) || divisor == 0 {
        return Ok(Vec::new());
    }
    let hull = Polygon::hull_of(points)?;
    let pitch = extent / divisor as f64;
    let mut out = hull.boundary_samples(pitch);
    if hull.vertices().len() >= 3 {
        let (x0, y0, x1, y1) = cloud.bounds();
        let nx = ((x1 - x0) / pitch).ceil() as usize;
        let ny = ((y1 - y0) / pitch).ceil() as usize;
        for i in 0..=nx {
            for j in 0..=ny {
                let z = Complex64::new(x0 + i as f64 * pitch, y0 + j as f64 * pitch);
                if contains(&hull, z, 0.0) {
                    out.push(z);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c as cx, real_diag, ONE};
    use crate::planarsets::hausdorff_distance;

    #[test]
    fn haar_unitary_is_unitary_and_deterministic() {
        let u = haar_unitary(1, 3);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-15);
        for n in 1..12 {
            let v = haar_unitary(n, n as u64);
            assert!(unitarity_defect(&v) <= 1e-12);
            assert_eq!(v, haar_unitary(n, n as u64));
        }
    }

    #[test]
    fn haar_second_moment() {
        let mut rng = substream(99, 0);
        let m = 100_000;
        let mean: f64 = (0..m).map(|_| haar_unitary_with(2, &mut rng)[(0, 0)].norm_sqr()).sum::<f64>() / m as f64;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");
    }

    #[test]
    fn haar_phases_are_not_biased() {
        // without the phase fix the diagonal of Q leans towards the positive reals
        let mut rng = substream(5, 0);
        let m = 20_000;
        let mean: Complex64 = (0..m).map(|_| haar_unitary_with(3, &mut rng)[(0, 0)]).sum::<Complex64>() / m as f64;
        assert!(mean.norm() < 0.02, "{mean}");
    }

    #[test]
    fn wc_point_examples() {
        let cm = real_diag(&[1.0, 0.0]);
        let am = real_diag(&[0.0, 1.0]);
        assert_eq!(wc_point(&cm, &am, &CMat::identity(2, 2)).unwrap(), ZERO);
        let swap = permutation_matrix(&[1, 0]);
        assert_eq!(wc_point(&cm, &am, &swap).unwrap(), ONE);
        let a = CMat::from_fn(3, 3, |i, j| cx(i as f64 + 1.0, j as f64 - 1.0));
        let u = haar_unitary(3, 8);
        assert!((wc_point(&CMat::identity(3, 3), &a, &u).unwrap() - trace(&a)).norm() < 1e-12);
        assert!(wc_point(&cm, &a, &u).is_err());
        assert!(wc_point(&cm, &am, &real_diag(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn permutation_values_match_matrix_products() {
        let cm = CMat::from_fn(4, 4, |i, j| cx((i * j) as f64, i as f64 - j as f64));
        let am = CMat::from_fn(4, 4, |i, j| cx(i as f64 + 2.0 * j as f64, 1.0));
        for sigma in (0..4).permutations(4) {
            let p = permutation_matrix(&sigma);
            let direct = wc_unchecked(&cm, &am, &p);
            assert!((direct - wc_permutation(&cm, &am, &sigma)).norm() < 1e-12);
        }
    }

    #[test]
    fn conjugation_invariance() {
        let cm = CMat::from_fn(3, 3, |i, j| cx(i as f64 - j as f64, (i + j) as f64));
        let am = CMat::from_fn(3, 3, |i, j| cx(1.0 / (1.0 + i as f64 + j as f64), 0.5));
        let v = haar_unitary(3, 1);
        let u = haar_unitary(3, 2);
        let lhs = wc_point(&(&v * &cm * v.adjoint()), &(&v * &am * v.adjoint()), &(&v * &u * v.adjoint())).unwrap();
        assert!((lhs - wc_point(&cm, &am, &u).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn geodesic_values_match_direct_evaluation() {
        let cm = CMat::from_fn(4, 4, |i, j| cx((i + 2 * j) as f64, i as f64));
        let am = CMat::from_fn(4, 4, |i, j| cx(j as f64, (i * j) as f64 - 1.0));
        let (u0, u1) = (haar_unitary(4, 10), haar_unitary(4, 11));
        let ts = [0.0, 0.3, 0.7, 1.0];
        let fast = geodesic_values(&cm, &am, &u0, &u1, &ts).unwrap();
        for (&t, z) in ts.iter().zip(fast) {
            let u = crate::linalg::unitary_geodesic(&u0, &u1, t).unwrap();
            assert!((wc_unchecked(&cm, &am, &u) - z).norm() < 1e-10);
        }
    }

    #[test]
    fn sample_range_examples() {
        let cm = real_diag(&[1.0, 0.0]);
        let am = real_diag(&[0.0, 1.0]);
        let est = sample_range(&cm, &am, 2000, 4).unwrap();
        for z in est.inner.points() {
            assert!(z.im.abs() <= 1e-10 && z.re >= -1e-10 && z.re <= 1.0 + 1e-10);
        }
        assert!(est.inner.points().iter().any(|z| (z - ONE).norm() < 1e-12));

        let a = CMat::from_fn(3, 3, |i, j| cx(i as f64, j as f64));
        let est = sample_range(&CMat::identity(3, 3), &a, 100, 1).unwrap();
        let tr = PointCloud::singleton(trace(&a));
        assert!(hausdorff_distance(&est.inner, &tr) < 1e-12);
        let est = sample_range(&a, &CMat::identity(3, 3), 100, 1).unwrap();
        assert!(hausdorff_distance(&est.inner, &tr) < 1e-12);
    }

    #[test]
    fn samples_respect_trace_norm_bound() {
        let cm = CMat::from_fn(4, 4, |i, j| cx((i as f64 - j as f64).sin(), (i * j) as f64 * 0.1));
        let am = CMat::from_fn(4, 4, |i, j| cx(1.0 / (1.0 + (i + j) as f64), -(i as f64)));
        let est = sample_range(&cm, &am, 500, 2).unwrap();
        assert!(est.inner.max_modulus() <= est.bound_radius + 1e-9);
        assert_eq!(est.star_centers, vec![trace(&cm) * trace(&am) / 4.0]);
    }

    #[test]
    fn sampling_is_reproducible() {
        let cm = real_diag(&[1.0, 0.5, 0.25]);
        let am = CMat::from_fn(3, 3, |i, j| cx(i as f64, j as f64));
        let a = sample_range(&cm, &am, 300, 17).unwrap();
        let b = sample_range(&cm, &am, 300, 17).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn estimate_range_adds_outer_polygon_in_convex_case() {
        let cm = real_diag(&[2.0, 1.0]);
        let mut am = CMat::zeros(2, 2);
        am[(0, 1)] = ONE;
        let opts = RangeOptions { count: 500, seed: 3, angles: 360, ..Default::default() };
        let est = estimate_range(&cm, &am, &opts).unwrap();
        let outer = est.outer.as_ref().expect("hermitian C");
        assert!(est.inner.points().iter().all(|&z| contains(outer, z, 1e-8)));
    }

    #[test]
    fn convex_fill_stays_in_outer_polygon() {
        let cm = real_diag(&[1.0, 0.3, -0.2]);
        let am = CMat::from_fn(3, 3, |i, j| cx((i + j) as f64 * 0.2, i as f64 - j as f64));
        let opts = RangeOptions { count: 300, seed: 5, angles: 180, fill: Some(40), ..Default::default() };
        let est = estimate_range(&cm, &am, &opts).unwrap();
        let outer = est.outer.as_ref().unwrap();
        assert!(est.inner.points().iter().all(|&z| contains(outer, z, 1e-8)));
        assert!(est.inner.resolution() <= 2.0 * est.inner.extent() / 40.0);
    }
}
