//! Built-in regression suite behind `specrange verify`.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::Tolerances;
use crate::dilation::dilate_contraction;
use crate::error::Result;
use crate::finrange::{
    boundary_hull, c_spectrum_matrix, haar_unitary, sample_range, substream, triangular_spectrum,
    wc_birkhoff_certificate, RangeOptions, SpectrumMode,
};
use crate::limits::{
    essential_center, interleave_indices, permutation_sum_set_unchecked, projected_range_unchecked, EssentialMethod,
    Interleaved,
};
use crate::linalg::{c, real_diag, trace, unitarity_defect, CMat, ONE, ZERO};
use crate::opmodel::{embed, modified_eig_seq, schmidt, Decay, DiagonalRule, EigSeq, OperatorSpec, SeqClass};
use crate::planarsets::{contains, convex_hull, directed_hausdorff, hausdorff_distance, PointCloud};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

fn check(name: &str, passed: bool, value: Option<f64>, detail: String) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed,
        value,
        detail,
    }
}

fn failed(name: &str, err: crate::Error) -> CheckResult {
    check(name, false, None, format!("error: {err}"))
}

/// `max_n |tr(C_n Π_n − C_n)|` over `n = 1..=max_n`, with `C_n` the
/// projection onto `e_{n+1}`; each term equals 1.
pub fn example_a4(max_n: usize) -> Vec<f64> {
    (1..=max_n)
        .map(|n| {
            let mut cn = CMat::zeros(n + 1, n + 1);
            cn[(n, n)] = ONE;
            let mut pi = CMat::identity(n + 1, n + 1);
            pi[(n, n)] = ZERO;
            trace(&(&cn * &pi - &cn)).norm()
        })
        .collect()
}

/// Hausdorff distance between `W_{Π_nCΠ_n}(Π_n)` and `W_C(I) = {1}` for
/// `C = e_1e_1*`.
pub fn example_a5(n: usize, ambient: usize) -> Result<f64> {
    let c1 = embed(&real_diag(&[1.0]), None)?;
    let opts = RangeOptions {
        count: 64,
        angles: 64,
        bridges: 0,
        ..Default::default()
    };
    let est = projected_range_unchecked(&c1, &OperatorSpec::identity(), n, ambient, &opts)?;
    let full = PointCloud::singleton(ONE);
    let truncated = match est.outer {
        Some(p) => p.to_cloud().union(&est.inner),
        None => est.inner,
    };
    Ok(hausdorff_distance(&truncated, &full))
}

/// Permutation sums of `a = (2^{-n})` against `b = (1, 1, …)` and
/// `b′ = (0, 1, 1, …)`, completed with the known tail `Σ_{n>trunc} a_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleA6 {
    pub a: Vec<f64>,
    pub a_prime: Vec<f64>,
    pub tail: f64,
    /// Distance from 1 to the completed `A′`.
    pub closure_distance: f64,
    /// Hausdorff distance between `A` and `A′`.
    pub gap: f64,
}

pub fn example_a6(trunc: usize) -> Result<ExampleA6> {
    let spec = OperatorSpec::diagonal_trace_class(DiagonalRule::Geometric { ratio: 0.5, scale: ONE }, "geometric")?;
    let a = modified_eig_seq(&spec, trunc)?;
    let ones = EigSeq::new(vec![ONE; trunc], 1.0, SeqClass::Bounded)?;
    let mut shifted = vec![ZERO];
    shifted.extend(vec![ONE; trunc - 1]);
    let primed = EigSeq::new(shifted, 1.0, SeqClass::Bounded)?;
    let tail = 0.5f64.powi(trunc as i32);
    let complete = |set: PointCloud| -> Vec<f64> {
        let mut v: Vec<f64> = set.points().iter().map(|z| z.re + tail).collect();
        v.sort_by(f64::total_cmp);
        v
    };
    let full = complete(permutation_sum_set_unchecked(&a, &ones, trunc, 0, 0)?.cloud);
    let primed = complete(permutation_sum_set_unchecked(&a, &primed, trunc, 0, 0)?.cloud);
    let cloud = |v: &[f64]| PointCloud::exact(v.iter().map(|&x| c(x, 0.0)).collect());
    let closure_distance = primed.iter().map(|x| (1.0 - x).abs()).fold(f64::INFINITY, f64::min);
    let gap = hausdorff_distance(&cloud(&full)?, &cloud(&primed)?);
    Ok(ExampleA6 {
        a: full,
        a_prime: primed,
        tail,
        closure_distance,
        gap,
    })
}

fn random_cloud(rng: &mut impl Rng, len: usize) -> PointCloud {
    PointCloud::exact((0..len).map(|_| c(rng.random(), rng.random())).collect()).expect("non-empty")
}

fn random_matrix(rng: &mut impl Rng, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

fn metric_suite(seed: u64) -> CheckResult {
    let mut rng = substream(seed, 101);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (a, b, z) = (random_cloud(&mut rng, 30), random_cloud(&mut rng, 25), random_cloud(&mut rng, 20));
        let (ab, ba) = (hausdorff_distance(&a, &b), hausdorff_distance(&b, &a));
        worst = worst
            .max(hausdorff_distance(&a, &a))
            .max((ab - ba).abs())
            .max(ab - hausdorff_distance(&a, &z) - hausdorff_distance(&z, &b));
    }
    check("hausdorff_metric_axioms", worst <= 1e-15, Some(worst), "identity, symmetry, triangle".into())
}

fn hull_suite(seed: u64) -> CheckResult {
    let mut rng = substream(seed, 102);
    let ok = (0..20).all(|_| {
        let cloud = random_cloud(&mut rng, 200);
        let hull = convex_hull(&cloud);
        cloud.points().iter().all(|&z| contains(&hull, z, 1e-12))
    });
    check("hull_contains_cloud", ok, None, "20 random clouds".into())
}

fn birkhoff_suite(seed: u64, tol: &Tolerances) -> CheckResult {
    let mut rng = substream(seed, 103);
    let n = 6;
    let g: Vec<Complex64> = (0..n).map(|_| c(rng.random(), rng.random())).collect();
    let t: Vec<Complex64> = (0..n).map(|_| c(rng.random(), rng.random())).collect();
    let mut worst = 0.0f64;
    for k in 0..50 {
        match wc_birkhoff_certificate(&g, &t, &haar_unitary(n, seed ^ k)) {
            Ok(cert) => worst = worst.max(cert.residual),
            Err(e) => return failed("birkhoff_certificates", e),
        }
    }
    let passed = worst <= tol.certificate;
    check("birkhoff_certificates", passed, Some(worst), "50 Haar unitaries, n = 6".into())
}

fn frame_suite(seed: u64) -> CheckResult {
    let mut rng = substream(seed, 104);
    let h = random_matrix(&mut rng, 4);
    let ch = (&h + h.adjoint()).map(|z| z * 0.5);
    let a = random_matrix(&mut rng, 4);
    let run = || -> Result<bool> {
        let outer = boundary_hull(&ch, &a, 360)?;
        let inner = sample_range(&ch, &a, 500, seed)?;
        Ok(inner.inner.points().iter().all(|&z| contains(&outer, z, 1e-8)))
    };
    match run() {
        Ok(ok) => check("hermitian_c_outer_hull", ok, None, "sampled values inside support polygon".into()),
        Err(e) => failed("hermitian_c_outer_hull", e),
    }
}

fn schmidt_suite(seed: u64) -> CheckResult {
    let mut rng = substream(seed, 105);
    let m = random_matrix(&mut rng, 7);
    match schmidt(&m) {
        Ok(s) => {
            let r = (s.reconstruct() - &m).norm();
            check("schmidt_reconstruction", r <= 1e-12, Some(r), "7×7 random".into())
        }
        Err(e) => failed("schmidt_reconstruction", e),
    }
}

fn dilation_suite(seed: u64, tol: &Tolerances) -> CheckResult {
    let mut worst = 0.0f64;
    for k in 0..10u64 {
        let n = 2 + k as usize;
        let u = haar_unitary(n, seed ^ (k + 200)).map(|z| z * 0.95);
        match dilate_contraction(&u) {
            Ok(d) => worst = worst.max(unitarity_defect(&d.v)),
            Err(e) => return failed("dilation_unitarity", e),
        }
    }
    check("dilation_unitarity", worst <= tol.algebra, Some(worst), "10 contractions, n = 2..11".into())
}

fn triangular_suite(seed: u64) -> CheckResult {
    let mut rng = substream(seed, 106);
    let mut worst = 0.0f64;
    for n in 2..12 {
        let m = CMat::from_fn(n, n, |i, j| {
            if i <= j {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            } else {
                ZERO
            }
        });
        match triangular_spectrum(&m, 0.0) {
            Ok(s) => worst = worst.max(s.eigensolver_distance),
            Err(e) => return failed("triangular_spectrum", e),
        }
    }
    check("triangular_spectrum", worst <= 1e-8, Some(worst), "upper triangular, n = 2..11".into())
}

fn interleave_suite() -> CheckResult {
    use Interleaved::{F, G};
    let ok = interleave_indices(8) == vec![F(1), G(1), F(2), G(2), F(3), F(4), F(5), G(3)];
    check("interleave_pattern", ok, None, "k = 8".into())
}

fn essential_suite() -> CheckResult {
    let run = || -> Result<(bool, f64)> {
        let compact = OperatorSpec::diagonal(DiagonalRule::Power { a: ONE, p: 1.0 }, Decay::NullSequence)?;
        let zero = essential_center(&compact, 64, EssentialMethod::CesaroDiagonal)?;
        let alt = OperatorSpec::diagonal(DiagonalRule::Periodic { values: vec![c(-1.0, 0.0), ONE] }, Decay::BoundedOnly)?;
        let est = essential_center(&alt, 256, EssentialMethod::CesaroDiagonal)?;
        Ok((zero.center_candidates.points() == [ZERO], est.center.norm()))
    };
    match run() {
        Ok((exact_zero, alt)) => check(
            "essential_center",
            exact_zero && alt <= 1.0 / 256.0,
            Some(alt),
            "compact gives {0}; alternating signs give 0 within 1/256".into(),
        ),
        Err(e) => failed("essential_center", e),
    }
}

fn spectrum_cauchy_suite() -> CheckResult {
    let gamma: Vec<Complex64> = (1..=8).map(|j| c(0.5f64.powi(j), 0.0)).collect();
    let tau: Vec<Complex64> = (1..=8)
        .map(|j| Complex64::from_polar(1.0 / j as f64, std::f64::consts::PI * j as f64 / 4.0))
        .collect();
    let mut worst = f64::NEG_INFINITY;
    for n in 3..8 {
        let lo = c_spectrum_matrix(&gamma[..n], &tau[..n], SpectrumMode::Exhaustive);
        let hi = c_spectrum_matrix(&gamma[..n + 1], &tau[..n + 1], SpectrumMode::Exhaustive);
        match (lo, hi) {
            (Ok(lo), Ok(hi)) => {
                let bound = 0.5f64.powi(n as i32);
                worst = worst.max(directed_hausdorff(&lo.points, &hi.points) - bound);
            }
            (Err(e), _) | (_, Err(e)) => return failed("spectrum_truncation_bound", e),
        }
    }
    check(
        "spectrum_truncation_bound",
        worst <= 1e-15,
        Some(worst),
        "every truncated sum is within ‖T‖·tail of the next level".into(),
    )
}

fn examples_suite() -> Vec<CheckResult> {
    let a4 = example_a4(16);
    let a4_ok = a4.iter().all(|&v| v == 1.0);
    let mut out = vec![check(
        "example_uniform_failure",
        a4_ok,
        a4.first().copied(),
        "|tr(C_n Π_n − C_n)| = 1 for n = 1..16".into(),
    )];
    out.push(match example_a5(4, 8) {
        Ok(gap) => check(
            "example_projected_truncation_gap",
            (gap - 1.0).abs() <= 1e-9,
            Some(gap),
            "Δ([0,1], {1}) for C = e₁e₁*, T = I".into(),
        ),
        Err(e) => failed("example_projected_truncation_gap", e),
    });
    out.push(match example_a6(8) {
        Ok(ex) => check(
            "example_zero_padding_counterexample",
            ex.a.len() == 1
                && (ex.a[0] - 1.0).abs() <= 1e-15
                && ex.closure_distance <= ex.tail + 1e-15
                && ex.gap >= 0.5 - 1e-15,
            Some(ex.gap),
            format!("A = {{1}}, dist(1, A′) = {:e}, Δ(A, A′) = {}", ex.closure_distance, ex.gap),
        ),
        Err(e) => failed("example_zero_padding_counterexample", e),
    });
    out
}

pub fn run_suite(seed: u64, tol: &Tolerances) -> VerifyReport {
    let mut checks = vec![
        metric_suite(seed),
        hull_suite(seed),
        birkhoff_suite(seed, tol),
        frame_suite(seed),
        schmidt_suite(seed),
        dilation_suite(seed, tol),
        triangular_suite(seed),
        interleave_suite(),
        essential_suite(),
        spectrum_cauchy_suite(),
    ];
    checks.extend(examples_suite());
    VerifyReport {
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples_match_their_closed_forms() {
        assert!(example_a4(8).iter().all(|&v| v == 1.0));
        assert!((example_a5(3, 6).unwrap() - 1.0).abs() <= 1e-9);
        let ex = example_a6(8).unwrap();
        assert_eq!(ex.a, vec![1.0]);
        assert_eq!(ex.a_prime.len(), 8);
        assert!((ex.closure_distance - 0.5f64.powi(8)).abs() < 1e-15);
        assert!((ex.gap - 0.5).abs() < 1e-15);
    }

    #[test]
    fn default_suite_passes() {
        let report = run_suite(0, &Tolerances::default());
        for c in &report.checks {
            assert!(c.passed, "{c:?}");
        }
    }
}
