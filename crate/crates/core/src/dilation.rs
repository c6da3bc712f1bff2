//! Unitary dilation of contractions and the unitaries `û_n` that approximate
//! a unitary strongly through dilated corners.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_defect, hermitian_eig_desc, is_square, op_norm, unitarity_defect, CMat, ZERO};

/// The four `n×n` blocks of a dilation `V = [[U, Q], [R, S]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationBlocks {
    pub u: CMat,
    pub q: CMat,
    pub r: CMat,
    pub s: CMat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DilationResult {
    pub v: CMat,
    pub blocks: DilationBlocks,
}

/// Unique positive semidefinite square root of a hermitian PSD matrix.
///
/// Eigenvalues down to `−1e-12` are clamped to zero.
pub fn psd_sqrt(m: &CMat) -> Result<CMat> {
    if !is_square(m) {
        return Err(Error::size("psd_sqrt needs a square matrix"));
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if hermitian_defect(m) > 1e-12 * scale {
        return Err(Error::domain("psd_sqrt needs a hermitian matrix"));
    }
    let (values, vectors) = hermitian_eig_desc(m);
    if let Some(&low) = values.last() {
        if low < -1e-8 {
            return Err(Error::domain(format!("matrix is not positive semidefinite (eigenvalue {low:e})")));
        }
        if low < -1e-12 {
            log::warn!("eigenvalue {low:e} between −1e-8 and −1e-12 clamped to 0");
        }
    }
    let roots: Vec<Complex64> = values.iter().map(|&l| Complex64::from(l.max(0.0).sqrt())).collect();
    let scaled = CMat::from_fn(m.nrows(), m.ncols(), |i, j| vectors[(i, j)] * roots[j]);
    Ok(&scaled * vectors.adjoint())
}

/// `V = [[U, Q], [R, S]]` with `Q = √(I − UU†)` and the last `n` rows
/// completing the first `n` to an orthonormal basis.
pub fn dilate_contraction(u: &CMat) -> Result<DilationResult> {
    if !is_square(u) || u.nrows() == 0 {
        return Err(Error::size("dilate_contraction needs a non-empty square matrix"));
    }
    let n = u.nrows();
    let norm = op_norm(u);
    if !norm.is_finite() || norm > 1.0 + 1e-10 {
        return Err(Error::domain(format!("‖u‖ = {norm} exceeds 1")));
    }
    let u = if norm > 1.0 + 64.0 * f64::EPSILON {
        log::warn!("contraction norm {norm} rescaled to 1");
        u.map(|z| z / norm)
    } else {
        u.clone()
    };
    let defect = CMat::identity(n, n) - &u * u.adjoint();
    let q = psd_sqrt(&defect)?;

    let mut v = CMat::zeros(2 * n, 2 * n);
    v.view_mut((0, 0), (n, n)).copy_from(&u);
    v.view_mut((0, n), (n, n)).copy_from(&q);

    let mut filled = n;
    for k in 0..2 * n {
        if filled == 2 * n {
            break;
        }
        let mut row = vec![ZERO; 2 * n];
        row[k] = Complex64::from(1.0);
        for _ in 0..2 {
            for i in 0..filled {
                let dot: Complex64 = (0..2 * n).map(|j| v[(i, j)].conj() * row[j]).sum();
                for j in 0..2 * n {
                    row[j] -= dot * v[(i, j)];
                }
            }
        }
        let len = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if len < 1e-8 {
            continue;
        }
        for j in 0..2 * n {
            v[(filled, j)] = row[j] / len;
        }
        filled += 1;
    }
    if filled < 2 * n {
        return Err(Error::numerical("row completion ran out of candidates"));
    }
    let blocks = DilationBlocks {
        u,
        q,
        r: v.view((n, 0), (n, n)).into_owned(),
        s: v.view((n, n), (n, n)).into_owned(),
    };
    Ok(DilationResult { v, blocks })
}

/// `û_n`: the dilation `v_n` of the leading `n×n` block of `u_big`,
/// embedded in the leading `2n×2n` block of an `N×N` zero matrix.
pub fn approx_unitary(u_big: &CMat, n: usize) -> Result<(CMat, CMat)> {
    if !is_square(u_big) {
        return Err(Error::size("approx_unitary needs a square matrix"));
    }
    let big = u_big.nrows();
    if n == 0 || 2 * n > big {
        return Err(Error::size(format!("need 1 ≤ n and 2n ≤ {big}, got n = {n}")));
    }
    if unitarity_defect(u_big) > 1e-10 {
        return Err(Error::domain("approx_unitary needs a unitary matrix (to 1e-10)"));
    }
    let corner = u_big.view((0, 0), (n, n)).into_owned();
    let v_n = dilate_contraction(&corner)?.v;
    let mut u_hat = CMat::zeros(big, big);
    u_hat.view_mut((0, 0), (2 * n, 2 * n)).copy_from(&v_n);
    Ok((u_hat, v_n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finrange::{haar_unitary, substream};
    use crate::linalg::{c, permutation_matrix, real_diag, trace, ONE};
    use rand::Rng;

    fn defect(v: &CMat) -> f64 {
        unitarity_defect(v)
    }

    #[test]
    fn psd_sqrt_examples() {
        assert!((psd_sqrt(&CMat::identity(3, 3)).unwrap() - CMat::identity(3, 3)).norm() < 1e-15);
        let r = psd_sqrt(&real_diag(&[4.0, 9.0])).unwrap();
        assert!((r - real_diag(&[2.0, 3.0])).norm() < 1e-14);
        let mut rng = substream(5, 0);
        let g = CMat::from_fn(6, 6, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let p = &g * g.adjoint();
        let s = psd_sqrt(&p).unwrap();
        assert!((&s * &s - &p).norm() < 1e-10);
        assert!(psd_sqrt(&real_diag(&[1.0, -1e-6])).is_err());
        assert!(psd_sqrt(&real_diag(&[1.0, -1e-13])).is_ok());
    }

    #[test]
    fn one_by_one_dilations() {
        let zero = dilate_contraction(&CMat::zeros(1, 1)).unwrap();
        assert_eq!(zero.v[(0, 0)], ZERO);
        assert!(defect(&zero.v) < 1e-15);
        let one = dilate_contraction(&CMat::from_element(1, 1, ONE)).unwrap();
        assert_eq!(one.v[(0, 0)], ONE);
        assert!(one.blocks.q.norm() < 1e-15);
        assert!(defect(&one.v) < 1e-15);
    }

    #[test]
    fn random_contraction_dilates() {
        let u = haar_unitary(5, 3).map(|z| z * 0.9);
        let d = dilate_contraction(&u).unwrap();
        assert!(defect(&d.v) <= 1e-12);
        assert_eq!(d.v.view((0, 0), (5, 5)).into_owned(), u);
        let id = &d.blocks.u * d.blocks.u.adjoint() + &d.blocks.q * d.blocks.q.adjoint();
        assert!((id - CMat::identity(5, 5)).norm() <= 1e-12);
    }

    #[test]
    fn dilation_is_deterministic() {
        let u = haar_unitary(4, 1).map(|z| z * 0.5);
        assert_eq!(dilate_contraction(&u).unwrap(), dilate_contraction(&u).unwrap());
    }

    #[test]
    fn norm_limits() {
        let slightly = CMat::from_element(1, 1, c(1.0 + 5e-11, 0.0));
        let d = dilate_contraction(&slightly).unwrap();
        assert_eq!(d.v[(0, 0)], ONE);
        assert!(dilate_contraction(&CMat::from_element(1, 1, c(1.1, 0.0))).is_err());
    }

    #[test]
    fn approx_unitary_examples() {
        let (u_hat, v) = approx_unitary(&CMat::identity(8, 8), 3).unwrap();
        assert_eq!(v, CMat::identity(6, 6));
        assert_eq!(u_hat.view((0, 0), (6, 6)).into_owned(), CMat::identity(6, 6));
        assert_eq!(u_hat[(7, 7)], ZERO);

        let swap = permutation_matrix(&[1, 0, 2, 3, 4, 5, 6, 7]);
        let (u_hat, _) = approx_unitary(&swap, 2).unwrap();
        assert_eq!(u_hat.view((0, 0), (4, 4)).into_owned(), swap.view((0, 0), (4, 4)).into_owned());

        assert!(approx_unitary(&CMat::identity(4, 4), 3).is_err());
    }

    #[test]
    fn trace_identity_on_embedded_blocks() {
        let big = 16;
        let u_big = haar_unitary(big, 9);
        let mut rng = substream(9, 1);
        let cm = CMat::from_fn(big, big, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let tm = CMat::from_fn(big, big, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let n = 4;
        let (u_hat, v) = approx_unitary(&u_big, n).unwrap();
        let lhs = trace(&(&cm * u_hat.adjoint() * &tm * &u_hat));
        let cn = cm.view((0, 0), (2 * n, 2 * n)).into_owned();
        let tn = tm.view((0, 0), (2 * n, 2 * n)).into_owned();
        let rhs = trace(&(&cn * v.adjoint() * &tn * &v));
        assert!((lhs - rhs).norm() <= 1e-12);
    }

    #[test]
    fn approximants_approach_on_leading_vectors() {
        let big = 64;
        let u_big = haar_unitary(big, 21);
        let errors: Vec<f64> = [8, 16, 32]
            .iter()
            .map(|&n| {
                let (u_hat, _) = approx_unitary(&u_big, n).unwrap();
                (0..8).map(|j| (u_hat.column(j) - u_big.column(j)).norm()).fold(0.0, f64::max)
            })
            .collect();
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    }
}
