//! Dense complex linear algebra shared by the numerical modules.

use nalgebra::linalg::{Schur, SymmetricEigen};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn diag(values: &[Complex64]) -> CMat {
    CMat::from_diagonal(&DVector::from_row_slice(values))
}

pub fn real_diag(values: &[f64]) -> CMat {
    CMat::from_fn(values.len(), values.len(), |i, j| {
        if i == j {
            c(values[i], 0.0)
        } else {
            ZERO
        }
    })
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Trace of a product `a * b` without forming it.
pub fn trace_of_product(a: &CMat, b: &CMat) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Largest absolute entry.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_square(m: &CMat) -> bool {
    m.nrows() == m.ncols()
}

pub fn hermitian_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    is_square(m) && hermitian_defect(m) <= tol
}

/// `‖U†U − I‖` in the max-entry norm.
pub fn unitarity_defect(u: &CMat) -> f64 {
    let n = u.ncols();
    max_abs(&(u.adjoint() * u - CMat::identity(n, n)))
}

pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    is_square(u) && unitarity_defect(u) <= tol
}

/// Relative normality test `‖AA† − A†A‖ ≤ tol·‖A‖²` in the operator norm.
pub fn is_normal(m: &CMat, tol: f64) -> bool {
    if !is_square(m) {
        return false;
    }
    let norm = op_norm(m);
    if norm == 0.0 {
        return true;
    }
    let commutator = m * m.adjoint() - m.adjoint() * m;
    op_norm(&commutator) <= tol * norm * norm
}

/// Eigenvalues of a square matrix, read off the complex Schur form.
pub fn eigenvalues(m: &CMat) -> Result<Vec<Complex64>> {
    if !is_square(m) {
        return Err(Error::size("eigenvalues of a non-square matrix"));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::numerical("Schur iteration did not converge"))?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().cloned().collect())
}

/// Unitary diagonalisation `m = Q diag(λ) Q†` of a normal matrix.
pub fn normal_eig(m: &CMat) -> Result<(Vec<Complex64>, CMat)> {
    if !is_square(m) {
        return Err(Error::size("eigendecomposition of a non-square matrix"));
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::numerical("Schur iteration did not converge"))?;
    let (q, t) = schur.unpack();
    Ok((t.diagonal().iter().cloned().collect(), q))
}

/// Eigen-decomposition of a hermitian matrix with eigenvalues sorted in
/// decreasing order; the columns of the returned matrix follow that order.
pub fn hermitian_eig_desc(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let herm = (m + m.adjoint()).map(|z| z * 0.5);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Decreasingly sorted eigenvalues of a hermitian matrix.
pub fn hermitian_eigenvalues_desc(m: &CMat) -> Vec<f64> {
    let herm = (m + m.adjoint()).map(|z| z * 0.5);
    let mut values: Vec<f64> = herm.symmetric_eigenvalues().iter().cloned().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Permutation matrix `P` with `P e_i = e_{σ(i)}` (0-based `sigma`).
pub fn permutation_matrix(sigma: &[usize]) -> CMat {
    let n = sigma.len();
    let mut p = CMat::zeros(n, n);
    for (i, &s) in sigma.iter().enumerate() {
        p[(s, i)] = ONE;
    }
    p
}

/// Point `U(t)` on the geodesic `U0 · exp(t log(U0† U1))` of the unitary group.
pub fn unitary_geodesic(u0: &CMat, u1: &CMat, t: f64) -> Result<CMat> {
    let w = u0.adjoint() * u1;
    let (lambda, q) = normal_eig(&w)?;
    let powered: Vec<Complex64> = lambda
        .iter()
        .map(|l| Complex64::from_polar(1.0, l.arg() * t))
        .collect();
    Ok(u0 * (&q * diag(&powered) * q.adjoint()))
}

/// JSON scalar: either a bare real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum JsonScalar {
    Real(f64),
    Pair([f64; 2]),
}

impl From<JsonScalar> for Complex64 {
    fn from(s: JsonScalar) -> Self {
        match s {
            JsonScalar::Real(r) => c(r, 0.0),
            JsonScalar::Pair([re, im]) => c(re, im),
        }
    }
}

impl From<Complex64> for JsonScalar {
    fn from(z: Complex64) -> Self {
        JsonScalar::Pair([z.re, z.im])
    }
}

/// Dense matrix as nested rows of `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<Vec<JsonScalar>>);

impl MatrixJson {
    pub fn from_matrix(m: &CMat) -> Self {
        MatrixJson(
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect())
                .collect(),
        )
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let rows = self.0.len();
        let cols = self.0.first().map_or(0, Vec::len);
        if let Some(bad) = self.0.iter().position(|r| r.len() != cols) {
            return Err(Error::Input(format!(
                "matrix row {} has {} entries, expected {cols}",
                bad + 1,
                self.0[bad].len()
            )));
        }
        let m = CMat::from_fn(rows, cols, |i, j| self.0[i][j].into());
        if let Some(pos) = m.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Input(format!(
                "matrix entry {pos} (column-major) is not finite"
            )));
        }
        Ok(m)
    }
}
