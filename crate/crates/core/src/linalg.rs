//! Small dense complex helpers shared by the evaluator and the oracles.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Determinant through partially pivoted LU. The empty matrix has
/// determinant one.
pub fn det(m: &CMatrix) -> Complex64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// 2-norm condition number from the singular values; infinite when the
/// smallest singular value vanishes. The empty matrix reports 1.
pub fn condition_estimate(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Number of singular values above `rel_tol` times the largest one.
pub fn numerical_rank(m: &CMatrix, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Vandermonde product `prod_{i>j} (z_i - z_j)`; one for zero or one point.
pub fn vandermonde(points: &[Complex64]) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    for i in 0..points.len() {
        for j in 0..i {
            p *= points[i] - points[j];
        }
    }
    p
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}
