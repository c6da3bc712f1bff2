use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Decay, DiagonalRule, Dim, EntryRule, OperatorKind, OperatorSpec};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, is_normal, op_norm, CMat, ZERO};

/// Singular values with left and right singular frames:
/// `m = Σ_k s_k · left_k · right_k*`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtTriple {
    pub singulars: Vec<f64>,
    /// Columns are the left singular vectors.
    pub left: CMat,
    /// Columns are the right singular vectors.
    pub right: CMat,
}

impl SchmidtTriple {
    pub fn reconstruct(&self) -> CMat {
        let mut m = CMat::zeros(self.left.nrows(), self.right.nrows());
        for (k, &s) in self.singulars.iter().enumerate() {
            m += (self.left.column(k) * self.right.column(k).adjoint()) * Complex64::from(s);
        }
        m
    }
}

fn sorted_svd(m: &CMat) -> Result<(Vec<f64>, CMat, CMat)> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::numerical("SVD of a matrix with non-finite entries"));
    }
    let svd = m
        .clone()
        .try_svd(true, true, 5.0 * f64::EPSILON, 10_000)
        .ok_or_else(|| Error::numerical("SVD did not converge"))?;
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::numerical("SVD did not return singular vectors")),
    };
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s = order.iter().map(|&k| svd.singular_values[k]).collect();
    let v = v_t.adjoint();
    let left = CMat::from_fn(u.nrows(), order.len(), |i, k| u[(i, order[k])]);
    let right = CMat::from_fn(v.nrows(), order.len(), |i, k| v[(i, order[k])]);
    Ok((s, left, right))
}

/// Sum of the singular values.
pub fn trace_norm(m: &CMat) -> Result<f64> {
    if m.is_empty() {
        return Ok(0.0);
    }
    Ok(sorted_svd(m)?.0.iter().sum())
}

pub fn schmidt(m: &CMat) -> Result<SchmidtTriple> {
    if m.is_empty() {
        return Err(Error::domain("Schmidt decomposition of an empty matrix"));
    }
    let (singulars, left, right) = sorted_svd(m)?;
    Ok(SchmidtTriple {
        singulars,
        left,
        right,
    })
}

/// Summability class of an eigenvalue sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeqClass {
    /// `tail_bound` bounds `Σ_{j>N} |γ_j|`.
    TraceClass,
    /// `tail_bound` bounds `sup_{j>N} |γ_j|` and the sequence tends to zero.
    NullSequence,
    /// `tail_bound` bounds `sup_{j>N} |γ_j|`; no decay is known.
    Bounded,
}

/// Prefix `(γ_1, …, γ_N)` of a modified eigenvalue sequence with a bound on
/// what was cut off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigSeq {
    #[serde(with = "super::rules::scalar_vec")]
    pub values: Vec<Complex64>,
    pub tail_bound: f64,
    pub class: SeqClass,
}

impl EigSeq {
    pub fn new(values: Vec<Complex64>, tail_bound: f64, class: SeqClass) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("eigenvalue prefix must be non-empty"));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("eigenvalues must be finite"));
        }
        if !(tail_bound >= 0.0) {
            return Err(Error::domain("tail bound must be non-negative"));
        }
        Ok(EigSeq {
            values,
            tail_bound,
            class,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Bound on `sup_{j>N} |γ_j|`, valid for every class.
    pub fn sup_tail(&self) -> f64 {
        self.tail_bound
    }

    /// `Σ_{j≤N} |γ_j|`.
    pub fn abs_sum(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).sum()
    }

    /// The first `n` entries, extended by zeros when `n` exceeds the prefix
    /// and the sequence is known to end there.
    pub fn prefix(&self, n: usize) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = self.values.iter().take(n).cloned().collect();
        v.resize(n, ZERO);
        v
    }

    /// The sequence with a zero inserted after every entry, which keeps the
    /// multiset of non-zero values and the summability class.
    pub fn zero_interleaved(&self) -> EigSeq {
        let mut values = Vec::with_capacity(2 * self.values.len());
        for &z in &self.values {
            values.push(z);
            values.push(ZERO);
        }
        EigSeq {
            values,
            tail_bound: self.tail_bound,
            class: self.class,
        }
    }
}

/// Modified eigenvalue sequence of a normal operator: non-zero eigenvalues in
/// order of decreasing modulus with zeros mixed in by the kernel/range rules.
///
/// * finite-dimensional range: the non-zero eigenvalues, then zeros;
/// * infinite-dimensional range, kernel of dimension `k`: `k` zeros, then the
///   non-zero eigenvalues;
/// * both infinite-dimensional: zeros at the even positions.
///
/// On a finite-dimensional space the sequence has exactly that many entries.
pub fn modified_eig_seq(op: &OperatorSpec, prefix_len: usize) -> Result<EigSeq> {
    if prefix_len == 0 {
        return Err(Error::domain("prefix length must be ≥ 1"));
    }
    match op.kind() {
        OperatorKind::Diagonal(rule) => diagonal_seq(op, rule, prefix_len),
        OperatorKind::FiniteMatrix(m) => {
            let values = finite_rank_values(m, Some(m.nrows()), prefix_len)?;
            EigSeq::new(values, 0.0, SeqClass::TraceClass)
        }
        OperatorKind::Entrywise(EntryRule::Shift) => {
            Err(Error::domain("the shift is not normal; it has no eigenvalue sequence"))
        }
        OperatorKind::Entrywise(rule @ (EntryRule::Embedded { .. } | EntryRule::Block { .. })) => {
            let (k, dim) = match rule {
                EntryRule::Embedded { matrix, ambient } => (matrix.0.len(), *ambient),
                EntryRule::Block { inner, k } => {
                    let dim = inner.dimension();
                    (dim.map_or(*k, |d| (*k).min(d)), dim)
                }
                EntryRule::Shift => unreachable!(),
            };
            let block = op.truncate(k.max(1))?;
            let values = finite_rank_values(&block, dim, prefix_len)?;
            EigSeq::new(values, 0.0, SeqClass::TraceClass)
        }
    }
}

/// Eigenvalues of a normal block, non-zero ones by decreasing modulus, then
/// zeros up to `dim` (or up to `prefix_len` on an infinite space).
fn finite_rank_values(m: &CMat, dim: Option<usize>, prefix_len: usize) -> Result<Vec<Complex64>> {
    let norm = op_norm(m);
    if !is_normal(m, 1e-10) {
        return Err(Error::domain(
            "operator is not normal to 1e-10; modified eigenvalue sequences need a normal operator",
        ));
    }
    let zero_tol = 1e-12 * norm;
    let mut values: Vec<Complex64> = eigenvalues(m)?
        .into_iter()
        .filter(|z| z.norm() > zero_tol)
        .collect();
    values.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    let len = dim.map_or(prefix_len, |d| d.min(prefix_len));
    values.truncate(len);
    values.resize(len, ZERO);
    Ok(values)
}

fn diagonal_seq(op: &OperatorSpec, rule: &DiagonalRule, prefix_len: usize) -> Result<EigSeq> {
    let class = match op.decay() {
        Decay::TraceClassWithTailBound(_) => SeqClass::TraceClass,
        _ if rule.is_null() => SeqClass::NullSequence,
        _ => SeqClass::Bounded,
    };

    if let Some(support) = rule.finite_support() {
        let mut values: Vec<Complex64> = (1..=support)
            .map(|j| rule.value(j))
            .filter(|&z| z != ZERO)
            .collect();
        values.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        let rest_sum: f64 = values.iter().skip(prefix_len).map(|z| z.norm()).sum();
        let rest_sup = values.get(prefix_len).map_or(0.0, |z| z.norm());
        values.truncate(prefix_len);
        values.resize(prefix_len, ZERO);
        let tail_bound = if class == SeqClass::TraceClass {
            rest_sum
        } else {
            rest_sup
        };
        return EigSeq::new(values, tail_bound, class);
    }

    if class != SeqClass::Bounded && !rule.monotone_modulus() {
        return Err(Error::domain(
            "diagonal moduli are not monotone; the order of decreasing modulus cannot be read off a prefix",
        ));
    }

    let leading_zeros = match rule.kernel_dim() {
        Dim::Finite(k) => Some(k),
        Dim::Infinite => None,
    };
    let wanted = match leading_zeros {
        Some(k) => prefix_len.saturating_sub(k),
        None => prefix_len.div_ceil(2),
    };

    // non-zero diagonal entries in index order, with the last index consumed
    let scan_cap = 64 * prefix_len + 4096;
    let mut nonzero = Vec::with_capacity(wanted);
    let mut last_index = 0;
    let mut j = 1;
    while nonzero.len() < wanted {
        if j > scan_cap {
            return Err(Error::numerical("too few non-zero diagonal entries in the scanned prefix"));
        }
        let z = rule.value(j);
        if z != ZERO {
            nonzero.push(z);
            last_index = j;
        }
        j += 1;
    }

    let mut values = Vec::with_capacity(prefix_len);
    match leading_zeros {
        Some(k) => {
            values.resize(k.min(prefix_len), ZERO);
            values.extend(nonzero);
        }
        None => {
            for z in nonzero {
                values.push(z);
                values.push(ZERO);
            }
            values.truncate(prefix_len);
        }
    }

    let tail_bound = match op.decay() {
        Decay::TraceClassWithTailBound(tail) => tail.bound(last_index),
        _ => match class {
            // monotone rules: the next non-zero entry dominates the rest
            SeqClass::NullSequence => (last_index + 1..=last_index + scan_cap)
                .map(|j| rule.value(j))
                .find(|&z| z != ZERO)
                .map_or(0.0, |z| z.norm()),
            _ => op.norm_bound(),
        },
    };
    EigSeq::new(values, tail_bound, class)
}
