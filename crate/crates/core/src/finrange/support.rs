use std::f64::consts::PI;

use num_complex::Complex64;

use super::check_pair;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, hermitian_eig_desc, hermitian_eigenvalues_desc, is_hermitian, is_normal, trace, CMat};
use crate::planarsets::Polygon;

/// `max_U Re(e^{-iθ} tr(C U† A U))` for hermitian `C`, as the sorted pairing
/// `Σ_k λ_k↓(C) λ_k↓(H_θ)` with `H_θ = (e^{-iθ}A + e^{iθ}A†)/2`.
pub fn support_value(c: &CMat, a: &CMat, theta: f64) -> Result<f64> {
    check_pair(c, a)?;
    if !is_hermitian(c, 1e-10) {
        return Err(Error::domain("support_value needs a hermitian C"));
    }
    Ok(sorted_pairing(c, a, theta))
}

fn rotated_hermitian(a: &CMat, theta: f64) -> CMat {
    let phase = Complex64::from_polar(1.0, -theta);
    (a * phase + a.adjoint() * phase.conj()) * Complex64::from(0.5)
}

fn sorted_pairing(h: &CMat, a: &CMat, theta: f64) -> f64 {
    let lc = hermitian_eigenvalues_desc(h);
    let lh = hermitian_eigenvalues_desc(&rotated_hermitian(a, theta));
    lc.iter().zip(&lh).map(|(x, y)| x * y).sum()
}

/// Least-squares line through the points: returns `(center, direction)`
/// with `|direction| = 1` when every point lies within `1e-9·spread` of
/// the line, `spread` being the largest distance to the centroid.
pub fn collinear_line(values: &[Complex64]) -> Option<(Complex64, Complex64)> {
    if values.is_empty() {
        return None;
    }
    let m = values.iter().sum::<Complex64>() / values.len() as f64;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for z in values {
        let d = z - m;
        sxx += d.re * d.re;
        sxy += d.re * d.im;
        syy += d.im * d.im;
    }
    let phi = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let dir = Complex64::from_polar(1.0, phi);
    let spread = values.iter().map(|z| (z - m).norm()).fold(0.0, f64::max);
    let residual = values
        .iter()
        .map(|z| ((z - m) * dir.conj()).im.abs())
        .fold(0.0, f64::max);
    (residual <= 1e-9 * spread).then_some((m, dir))
}

/// `W_C(A) = offset + phase · W_h(x)` with `h` hermitian.
///
/// When `C` is the normal operator with collinear eigenvalues, `h` comes from
/// `C` and `x = A`; otherwise `h` comes from `A` and `x = C`, using
/// `tr(C U† A U) = tr(A V† C V)` with `V = U†`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexFrame {
    pub offset: Complex64,
    pub phase: Complex64,
    pub h: CMat,
    pub x: CMat,
    pub swapped: bool,
}

/// Rotation and shift making `C` (or else `A`) hermitian, when `C` is normal
/// with collinear eigenvalues or `A` is essentially self-adjoint.
pub fn convex_frame(c: &CMat, a: &CMat) -> Option<ConvexFrame> {
    let straighten = |m: &CMat| -> Option<(Complex64, Complex64, CMat)> {
        if !is_normal(m, 1e-10) {
            return None;
        }
        let eig = eigenvalues(m).ok()?;
        let (center, dir) = collinear_line(&eig)?;
        let scale = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let spread = eig.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
        let n = m.nrows();
        let h = if spread <= 1e-13 * scale {
            CMat::zeros(n, n)
        } else {
            let shifted = (m - CMat::identity(n, n) * center) * dir.conj();
            (&shifted + shifted.adjoint()) * Complex64::from(0.5)
        };
        Some((center, dir, h))
    };
    if let Some((center, dir, h)) = straighten(c) {
        return Some(ConvexFrame {
            offset: center * trace(a),
            phase: dir,
            h,
            x: a.clone(),
            swapped: false,
        });
    }
    straighten(a).map(|(center, dir, h)| ConvexFrame {
        offset: center * trace(c),
        phase: dir,
        h,
        x: c.clone(),
        swapped: true,
    })
}

impl ConvexFrame {
    /// Support value of `W_h(x)` in direction `θ`.
    pub fn support(&self, theta: f64) -> f64 {
        sorted_pairing(&self.h, &self.x, theta)
    }

    /// A unitary `U` with `tr(C U† A U)` on the boundary: it maximizes the
    /// frame's support in direction `θ`.
    pub fn maximizer(&self, theta: f64) -> CMat {
        let (_, vh) = hermitian_eig_desc(&self.h);
        let (_, vk) = hermitian_eig_desc(&rotated_hermitian(&self.x, theta));
        let v = vk * vh.adjoint();
        if self.swapped {
            v.adjoint()
        } else {
            v
        }
    }

    /// Outer polygon from the support lines at `angles` equally spaced
    /// directions, intersecting consecutive lines.
    pub fn boundary_polygon(&self, angles: usize) -> Polygon {
        let thetas: Vec<f64> = (0..angles).map(|k| 2.0 * PI * k as f64 / angles as f64).collect();
        let support: Vec<f64> = thetas.iter().map(|&t| self.support(t)).collect();
        let mut corners = Vec::with_capacity(angles);
        for k in 0..angles {
            let l = (k + 1) % angles;
            let (t1, t2) = (thetas[k], thetas[l]);
            let det = (t2 - t1).sin();
            let x = (support[k] * t2.sin() - support[l] * t1.sin()) / det;
            let y = (support[l] * t1.cos() - support[k] * t2.cos()) / det;
            corners.push(self.offset + self.phase * Complex64::new(x, y));
        }
        Polygon::hull_of(&corners).expect("finite support lines")
    }
}

/// Outer convex polygon of `W_C(A)` from the support function on an angle
/// grid, when `C` is normal with collinear eigenvalues or `A` is essentially
/// self-adjoint.
pub fn boundary_hull(c: &CMat, a: &CMat, angles: usize) -> Result<Polygon> {
    check_pair(c, a)?;
    if angles < 3 {
        return Err(Error::domain("boundary_hull needs at least 3 angles"));
    }
    let frame = convex_frame(c, a).ok_or_else(|| {
        Error::Hypothesis(
            "C is not normal with collinear eigenvalues and A is not essentially self-adjoint; \
             the range need not be convex, use sample_range only"
                .into(),
        )
    })?;
    Ok(frame.boundary_polygon(angles))
}
