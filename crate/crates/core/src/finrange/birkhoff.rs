use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{permutation_sum, wc_unchecked};
use crate::error::{Error, Result};
use crate::linalg::{diag, is_square, unitarity_defect, CMat};
use crate::matching::max_min_matching;

/// `S_ij = |U_ji|²`.
pub fn unistochastic(u: &CMat) -> Result<DMatrix<f64>> {
    if !is_square(u) {
        return Err(Error::size("unistochastic needs a square matrix"));
    }
    if unitarity_defect(u) > 1e-10 {
        return Err(Error::domain("unistochastic needs a unitary matrix (to 1e-10)"));
    }
    let n = u.nrows();
    Ok(DMatrix::from_fn(n, n, |i, j| u[(j, i)].norm_sqr()))
}

fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &s) in p.iter().enumerate() {
        inv[s] = i;
    }
    inv
}

/// Convex decomposition `S ≈ Σ_k α_k P_{σ_k}` of a doubly stochastic matrix,
/// with `P_σ e_j = e_{σ(j)}`.
///
/// Each step takes the perfect matching on the support whose smallest entry
/// is largest and subtracts that entry along it. When more than
/// `(n − 1)² + 1` terms result, affine dependencies are eliminated.
pub fn birkhoff_decompose(s: &DMatrix<f64>, tol: f64) -> Result<Vec<(f64, Vec<usize>)>> {
    let n = s.nrows();
    if n == 0 || s.ncols() != n {
        return Err(Error::size("birkhoff_decompose needs a non-empty square matrix"));
    }
    if !(tol >= 0.0) {
        return Err(Error::domain("tolerance must be non-negative"));
    }
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let worst_sum = (0..n)
        .map(|i| (s.row(i).sum() - 1.0).abs().max((s.column(i).sum() - 1.0).abs()))
        .fold(0.0, f64::max);
    if min < -tol || worst_sum > tol.max(1e-12) {
        return Err(Error::domain(format!(
            "matrix is not doubly stochastic to {tol:e} (min entry {min:e}, row/column sum defect {worst_sum:e})"
        )));
    }

    let mut residual = s.map(|x| x.max(0.0));
    let mut terms: Vec<(f64, Vec<usize>)> = Vec::new();
    for _ in 0..n * n + 1 {
        if residual.iter().cloned().fold(0.0, f64::max) <= tol {
            break;
        }
        let rows: Vec<Vec<f64>> = (0..n).map(|i| residual.row(i).iter().cloned().collect()).collect();
        let matched = max_min_matching(&rows, 0.0).ok_or_else(|| {
            Error::numerical("no perfect matching on the residual support; matrix is not doubly stochastic enough")
        })?;
        let alpha = (0..n).map(|i| residual[(i, matched[i])]).fold(f64::INFINITY, f64::min);
        for i in 0..n {
            let entry = &mut residual[(i, matched[i])];
            *entry = if *entry == alpha { 0.0 } else { *entry - alpha };
        }
        terms.push((alpha, inverse(&matched)));
    }
    let leftover = residual.iter().cloned().fold(0.0, f64::max);
    if leftover > tol {
        return Err(Error::numerical(format!(
            "Birkhoff iteration stopped with residual {leftover:e} above {tol:e}"
        )));
    }
    let bound = (n - 1) * (n - 1) + 1;
    if terms.len() > bound {
        terms = caratheodory(terms, n, bound)?;
    }
    Ok(terms)
}

/// Removes affinely dependent permutation matrices until at most `bound`
/// remain, keeping the convex combination unchanged.
fn caratheodory(mut terms: Vec<(f64, Vec<usize>)>, n: usize, bound: usize) -> Result<Vec<(f64, Vec<usize>)>> {
    while terms.len() > bound {
        let k = terms.len();
        let rows = (n * n + 1).max(k);
        let mut m = DMatrix::<f64>::zeros(rows, k);
        for (col, (_, sigma)) in terms.iter().enumerate() {
            for (j, &i) in sigma.iter().enumerate() {
                m[(i * n + j, col)] = 1.0;
            }
            m[(n * n, col)] = 1.0;
        }
        let svd = m.svd(false, true);
        let v_t = svd.v_t.ok_or_else(|| Error::numerical("SVD failed in Carathéodory reduction"))?;
        let smallest = (0..k)
            .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
            .expect("k > 0");
        let lambda: Vec<f64> = v_t.row(smallest).iter().cloned().collect();
        let (pick, step) = lambda
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 1e-12)
            .map(|(idx, &l)| (idx, terms[idx].0 / l))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| Error::numerical("degenerate dependency in Carathéodory reduction"))?;
        for (idx, term) in terms.iter_mut().enumerate() {
            term.0 = (term.0 - step * lambda[idx]).max(0.0);
        }
        terms[pick].0 = 0.0;
        terms.retain(|t| t.0 > 0.0);
    }
    Ok(terms)
}

/// One permutation point of a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateTerm {
    pub weight: f64,
    /// `π` with point `Σ_i γ_i τ_{π(i)}`.
    pub pairing: Vec<usize>,
    pub point: Complex64,
}

/// `tr(C U† T U)` for diagonal `C`, `T` written as a convex combination of
/// permutation-pairing sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffCertificate {
    pub value: Complex64,
    pub terms: Vec<CertificateTerm>,
    /// `|value − Σ_k weight_k · point_k|`.
    pub residual: f64,
}

pub fn wc_birkhoff_certificate(c_eigs: &[Complex64], t_eigs: &[Complex64], u: &CMat) -> Result<BirkhoffCertificate> {
    let n = c_eigs.len();
    if t_eigs.len() != n || u.nrows() != n || !is_square(u) || n == 0 {
        return Err(Error::size("eigenvalue lists and U must share one non-zero size"));
    }
    let value = wc_unchecked(&diag(c_eigs), &diag(t_eigs), u);
    let s = unistochastic(u)?;
    let decomposition = birkhoff_decompose(&s, 1e-12)?;
    let terms: Vec<CertificateTerm> = decomposition
        .into_iter()
        .map(|(weight, sigma)| {
            let pairing = inverse(&sigma);
            let point = permutation_sum(c_eigs, t_eigs, &pairing);
            CertificateTerm { weight, pairing, point }
        })
        .collect();
    let combination: Complex64 = terms.iter().map(|t| t.point * t.weight).sum();
    Ok(BirkhoffCertificate {
        value,
        residual: (value - combination).norm(),
        terms,
    })
}
