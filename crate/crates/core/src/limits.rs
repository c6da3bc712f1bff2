//! Infinite-dimensional ranges and spectra through sequences of finite
//! truncations.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finrange::{
    c_spectrum_matrix, dedupe_points, estimate_range, permutation_sum, RangeEstimate, RangeOptions, SpectrumMode,
    SpectrumSet, EXHAUSTIVE_LIMIT,
};
use crate::linalg::{CMat, ZERO};
use crate::opmodel::{EigSeq, EntryRule, OperatorKind, OperatorSpec, SeqClass};
use crate::planarsets::{convex_hull, PointCloud, Polygon};

/// Increasing truncation sizes with a sample budget and seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSchedule {
    pub sizes: Vec<usize>,
    pub samples_per_size: usize,
    pub seed: u64,
}

impl TruncationSchedule {
    pub fn new(sizes: Vec<usize>, samples_per_size: usize, seed: u64) -> Result<Self> {
        let s = TruncationSchedule {
            sizes,
            samples_per_size,
            seed,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::Input("schedule.sizes must be non-empty".into()));
        }
        if self.sizes.iter().any(|&n| n < 2) {
            return Err(Error::Input("schedule.sizes must all be ≥ 2".into()));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Input("schedule.sizes must be strictly increasing".into()));
        }
        if self.samples_per_size == 0 {
            return Err(Error::Input("schedule.samples_per_size must be ≥ 1".into()));
        }
        Ok(())
    }

    /// Seed of the level with truncation size `n`.
    pub fn level_seed(&self, n: usize) -> u64 {
        self.seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }
}

/// `ν₁`-tail of `C` at `n` times `‖T‖`.
pub fn truncation_tail_bound(c: &OperatorSpec, t: &OperatorSpec, n: usize) -> Option<f64> {
    c.tail_bound(n).map(|tail| tail * t.norm_bound())
}

/// Range estimates of `W_{[C]_n}([T]_n)` for every size of the schedule.
pub fn range_sequence(
    c: &OperatorSpec,
    t: &OperatorSpec,
    sched: &TruncationSchedule,
    base: &RangeOptions,
) -> Result<Vec<RangeEstimate>> {
    sched.validate()?;
    if !c.is_trace_class() {
        return Err(Error::Hypothesis("C must be trace class with a tail bound".into()));
    }
    sched
        .sizes
        .par_iter()
        .map(|&n| {
            let cn = c.truncate(n)?;
            let tn = t.truncate(n)?;
            let opts = RangeOptions {
                count: sched.samples_per_size,
                seed: sched.level_seed(n),
                ..*base
            };
            estimate_range(&cn, &tn, &opts)
        })
        .collect()
}

/// `W_{Π_nCΠ_n}(Π_nTΠ_n)` on an ambient space of dimension `ambient > n`,
/// the block approximation that keeps the rest of the space.
///
/// For non-compact `T` the sequence of these sets need not converge to the
/// range of the operators; this is refused.
pub fn projected_range(
    c: &OperatorSpec,
    t: &OperatorSpec,
    n: usize,
    ambient: usize,
    opts: &RangeOptions,
) -> Result<RangeEstimate> {
    if !t.is_compact() {
        return Err(Error::Hypothesis(
            "block approximations of both operators need a compact T; use truncations instead".into(),
        ));
    }
    projected_range_unchecked(c, t, n, ambient, opts)
}

/// [`projected_range`] without the compactness check, for exhibiting the
/// failure on non-compact operators.
pub fn projected_range_unchecked(
    c: &OperatorSpec,
    t: &OperatorSpec,
    n: usize,
    ambient: usize,
    opts: &RangeOptions,
) -> Result<RangeEstimate> {
    if ambient <= n {
        return Err(Error::domain("ambient dimension must exceed the block size"));
    }
    let cn = c.block_approx(n)?.truncate(ambient)?;
    let tn = t.block_approx(n)?.truncate(ambient)?;
    estimate_range(&cn, &tn, opts)
}

fn diagonal_values(op: &OperatorSpec, n: usize) -> Result<Vec<Complex64>> {
    match op.kind() {
        OperatorKind::Diagonal(rule) => Ok((1..=n).map(|j| rule.value(j)).collect()),
        _ => Err(Error::domain("spectrum_sequence needs diagonal specs")),
    }
}

/// `P_{[C]_n}([T]_n)` for every size of the schedule: exhaustive for
/// `n ≤ 8`, otherwise sampled with the identity and reversal pairings
/// always included.
pub fn spectrum_sequence(c: &OperatorSpec, t: &OperatorSpec, sched: &TruncationSchedule) -> Result<Vec<SpectrumSet>> {
    sched.validate()?;
    if !c.is_trace_class() {
        return Err(Error::Hypothesis("C must be trace class with a tail bound".into()));
    }
    if !t.is_compact() {
        return Err(Error::Hypothesis("T must be compact".into()));
    }
    sched
        .sizes
        .iter()
        .map(|&n| {
            let gamma = diagonal_values(c, n)?;
            let tau = diagonal_values(t, n)?;
            if n <= EXHAUSTIVE_LIMIT {
                return c_spectrum_matrix(&gamma, &tau, SpectrumMode::Exhaustive);
            }
            let mode = SpectrumMode::Sampled {
                count: sched.samples_per_size,
                seed: sched.level_seed(n),
            };
            let sampled = c_spectrum_matrix(&gamma, &tau, mode)?;
            let identity: Vec<usize> = (0..n).collect();
            let reversal: Vec<usize> = (0..n).rev().collect();
            let mut points = sampled.points.into_points();
            points.push(permutation_sum(&gamma, &tau, &identity));
            points.push(permutation_sum(&gamma, &tau, &reversal));
            let cloud = PointCloud::exact(dedupe_points(points, 1e-12))?;
            let r = cloud.nn_spacing();
            Ok(SpectrumSet {
                points: cloud.with_resolution(r),
                mode,
                n,
            })
        })
        .collect()
}

/// How the essential-range candidates were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EssentialMethod {
    CesaroDiagonal,
    AccumulationHull,
}

/// Candidate points of the essential numerical range.
#[derive(Debug, Clone, PartialEq)]
pub struct EssentialEstimate {
    pub center_candidates: PointCloud,
    pub method: EssentialMethod,
    pub prefix_len: usize,
    /// `(k, (1/k) Σ_{j≤k} ⟨e_j, T e_j⟩)` at `k = L/4, L/2, L`.
    pub cesaro_means: Vec<(usize, Complex64)>,
    /// Extrapolated Cesàro limit.
    pub center: Complex64,
    /// `false` when the extrapolation and the last mean differ by more than
    /// `10 / L`.
    pub converged: bool,
    /// Hull of the diagonal entries in the window `[L/2, L]`
    /// (heuristic).
    pub accumulation_hull: Option<Polygon>,
    /// Off-diagonal entries are present and were not used.
    pub off_diagonal_ignored: bool,
}

/// Essential-range candidates from the diagonal of `T`.
///
/// Compact operators give exactly `{0}`. Otherwise the Cesàro means at
/// `L/4`, `L/2` and `L` are extrapolated under the model
/// `μ + (a + b ln k) / k`.
pub fn essential_center(t: &OperatorSpec, prefix_len: usize, method: EssentialMethod) -> Result<EssentialEstimate> {
    if prefix_len < 16 {
        return Err(Error::domain("essential_center needs prefix_len ≥ 16"));
    }
    let off_diagonal_ignored = !matches!(t.kind(), OperatorKind::Diagonal(_))
        && !matches!(t.kind(), OperatorKind::Entrywise(EntryRule::Shift));
    if t.is_compact() {
        return Ok(EssentialEstimate {
            center_candidates: PointCloud::singleton(ZERO),
            method,
            prefix_len,
            cesaro_means: Vec::new(),
            center: ZERO,
            converged: true,
            accumulation_hull: None,
            off_diagonal_ignored: false,
        });
    }
    let diagonal: Vec<Complex64> = (1..=prefix_len).map(|j| t.entry(j, j)).collect::<Result<_>>()?;
    let mut partial = vec![ZERO; prefix_len + 1];
    for j in 0..prefix_len {
        partial[j + 1] = partial[j] + diagonal[j];
    }
    let ks = [prefix_len / 4, prefix_len / 2, prefix_len];
    let means: Vec<(usize, Complex64)> = ks.iter().map(|&k| (k, partial[k] / k as f64)).collect();

    let rows = Matrix3::from_fn(|r, col| {
        let k = ks[r] as f64;
        match col {
            0 => 1.0,
            1 => 1.0 / k,
            _ => k.ln() / k,
        }
    });
    let lu = rows.lu();
    let solve = |values: Vector3<f64>| lu.solve(&values).map(|x| x[0]);
    let re = solve(Vector3::from_fn(|r, _| means[r].1.re));
    let im = solve(Vector3::from_fn(|r, _| means[r].1.im));
    let center = match (re, im) {
        (Some(re), Some(im)) => Complex64::new(re, im),
        _ => return Err(Error::numerical("singular Cesàro extrapolation system")),
    };
    let last = means[2].1;
    let converged = (center - last).norm() <= 10.0 / prefix_len as f64;
    if !converged {
        log::warn!("Cesàro means show no convergence: extrapolated {center}, last mean {last}");
    }

    let window = PointCloud::exact(diagonal[prefix_len / 2 - 1..].to_vec())?;
    let hull = convex_hull(&window);
    let mut candidates = vec![center];
    if method == EssentialMethod::AccumulationHull {
        candidates.extend(hull.boundary_samples((window.extent() / 64.0).max(1e-12)));
    }
    Ok(EssentialEstimate {
        center_candidates: PointCloud::exact(candidates)?,
        method,
        prefix_len,
        cesaro_means: means,
        center,
        converged,
        accumulation_hull: Some(hull),
        off_diagonal_ignored,
    })
}

/// Tag of a position in the interleaving of two orthonormal systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interleaved {
    F(usize),
    G(usize),
}

/// Positions `1..=k` of the sequence `(f_1, g_1, f_2, g_2, f_3, f_4, f_5, g_3, …)`
/// where position `2^m` (`m ≥ 1`) carries `g_m` and the others carry
/// successive `f`s.
pub fn interleave_indices(k: usize) -> Vec<Interleaved> {
    let (mut f, mut g) = (0, 0);
    (1..=k)
        .map(|p| {
            if p >= 2 && p.is_power_of_two() {
                g += 1;
                Interleaved::G(g)
            } else {
                f += 1;
                Interleaved::F(f)
            }
        })
        .collect()
}

/// Truncated permutation sums with the radius that the cut-off tail of `a`
/// can move them.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationSums {
    pub cloud: PointCloud,
    /// `Σ_{n>trunc} |a_n| · sup_n |b_n|`.
    pub tail_radius: f64,
}

/// `{Σ_{n≤trunc} a_n b_{σ(n)}}` over all permutations (`trunc ≤ 8`) or a
/// sample of them, for trace-class `a` and null-sequence `b`.
pub fn permutation_sum_set(a: &EigSeq, b: &EigSeq, trunc: usize, sample: usize, seed: u64) -> Result<PermutationSums> {
    if a.class != SeqClass::TraceClass {
        return Err(Error::domain("permutation_sum_set needs a trace-class sequence a"));
    }
    if b.class == SeqClass::Bounded {
        return Err(Error::domain("permutation_sum_set needs a null sequence b"));
    }
    permutation_sum_set_unchecked(a, b, trunc, sample, seed)
}

/// [`permutation_sum_set`] for any bounded `b`.
pub fn permutation_sum_set_unchecked(
    a: &EigSeq,
    b: &EigSeq,
    trunc: usize,
    sample: usize,
    seed: u64,
) -> Result<PermutationSums> {
    if trunc == 0 {
        return Err(Error::domain("truncation must be ≥ 1"));
    }
    if a.class != SeqClass::TraceClass {
        return Err(Error::domain("permutation_sum_set needs a trace-class sequence a"));
    }
    let av = a.prefix(trunc);
    let bv = b.prefix(trunc);
    let mode = if trunc <= EXHAUSTIVE_LIMIT {
        SpectrumMode::Exhaustive
    } else {
        SpectrumMode::Sampled { count: sample.max(1), seed }
    };
    let set = c_spectrum_matrix(&av, &bv, mode)?;
    let sup_b = bv.iter().map(|z| z.norm()).fold(b.sup_tail(), f64::max);
    Ok(PermutationSums {
        cloud: set.points,
        tail_radius: a_tail(a, trunc) * sup_b,
    })
}

/// `Σ_{n>trunc} |a_n|`, from the prefix and the stored tail bound.
fn a_tail(a: &EigSeq, trunc: usize) -> f64 {
    a.values.iter().skip(trunc).map(|z| z.norm()).sum::<f64>() + a.tail_bound
}

/// Zero-padded truncation of a matrix list: the leading `n×n` blocks of
/// `m` embedded at size `ambient`.
pub fn embed_block(m: &CMat, ambient: usize) -> CMat {
    let n = m.nrows().min(ambient);
    let mut out = CMat::zeros(ambient, ambient);
    out.view_mut((0, 0), (n, n)).copy_from(&m.view((0, 0), (n, n)));
    out
}
