//! Biorthogonal polynomials from the triangular factorization of the
//! bimoment matrix.
//!
//! Writing `B = K^{-1} H Kbar` with `K` unit lower triangular, `Kbar`
//! unit upper triangular and `H = diag(h_0, h_1, ...)`, the rows of `K`
//! are the coefficients of `sqrt(h_n) P_n(x)` and the columns of
//! `Kbar^{-1}` those of `sqrt(h_n) S_n(y)`, so that
//! `sum_atoms w P_j(x) S_k(y) = delta_jk`.
//!
//! Negative indices follow the series convention `P_n(x) = x^n`,
//! `S_n(y) = y^n`, `h_n = 1`, and for the Hilbert transforms
//! `Ptilde_n(mu) = mu^{-n-1}`, `Stilde_n(eta) = eta^{-n-1}`.

use crate::error::{Error, Result};
use crate::linalg::{c, max_abs, CMatrix};
use crate::measure::{BimomentMatrix, Measure};
use crate::summation::ComplexSum;
use num_complex::Complex64;

/// Relative pivot size below which a leading minor counts as singular.
pub const PIVOT_TOLERANCE: f64 = 1e-13;

/// Default distance below which an evaluation point counts as sitting
/// on the support of the measure.
pub const DEFAULT_EPS_POLE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct BiorthoSystem {
    h: Vec<Complex64>,
    sqrt_h: Vec<Complex64>,
    /// Unit lower triangular; row `n` holds the coefficients of `sqrt(h_n) P_n`.
    k: CMatrix,
    /// Unit upper triangular.
    kbar: CMatrix,
    /// Column `n` holds the coefficients of `sqrt(h_n) S_n`.
    kbar_inv: CMatrix,
}

impl BiorthoSystem {
    /// Doolittle elimination without pivoting on the leading `t x t`
    /// block. Pivoting would break the correspondence between the
    /// triangular factors and the polynomial coefficients.
    pub fn factorize(b: &BimomentMatrix, t: usize) -> Result<Self> {
        if t == 0 || t > b.size() {
            return Err(Error::Invalid(format!(
                "truncation T = {t} must lie in 1..={}",
                b.size()
            )));
        }
        let src = b.entries().view((0, 0), (t, t)).into_owned();
        let mut u = src.clone();
        let mut l = CMatrix::identity(t, t);
        let mut h = Vec::with_capacity(t);
        for p in 0..t {
            let row_scale = (0..t).map(|j| src[(p, j)].norm()).fold(0.0, f64::max);
            let pivot = u[(p, p)];
            let threshold = PIVOT_TOLERANCE * row_scale;
            if !(pivot.norm() > threshold) {
                return Err(Error::SingularMinor {
                    order: p + 1,
                    pivot: pivot.norm(),
                    threshold,
                });
            }
            for i in p + 1..t {
                let f = u[(i, p)] / pivot;
                l[(i, p)] = f;
                u[(i, p)] = c(0.0);
                for j in p + 1..t {
                    let up = u[(p, j)];
                    u[(i, j)] -= f * up;
                }
            }
            h.push(pivot);
            for j in p..t {
                u[(p, j)] /= pivot;
            }
            u[(p, p)] = c(1.0);
        }
        let k = unit_lower_inverse(&l);
        let kbar_inv = unit_upper_inverse(&u);
        let sqrt_h = h.iter().map(|v| v.sqrt()).collect();
        Ok(BiorthoSystem {
            h,
            sqrt_h,
            k,
            kbar: u,
            kbar_inv,
        })
    }

    /// Convenience: bimoments of `m` up to order `t` and their factorization.
    pub fn from_measure(m: &Measure, t: usize) -> Result<Self> {
        Self::factorize(&m.bimoment_matrix(t)?, t)
    }

    pub fn truncation(&self) -> usize {
        self.h.len()
    }

    /// `h_n`, with `h_n = 1` for negative `n`.
    pub fn h(&self, n: i64) -> Result<Complex64> {
        if n < 0 {
            return Ok(c(1.0));
        }
        self.h
            .get(n as usize)
            .copied()
            .ok_or(Error::Truncation {
                index: n,
                trunc: self.truncation(),
            })
    }

    /// The recorded square root of `h_n` (principal branch unless flipped).
    pub fn sqrt_h(&self, n: i64) -> Result<Complex64> {
        if n < 0 {
            return Ok(c(1.0));
        }
        self.sqrt_h
            .get(n as usize)
            .copied()
            .ok_or(Error::Truncation {
                index: n,
                trunc: self.truncation(),
            })
    }

    pub fn norms(&self) -> &[Complex64] {
        &self.h
    }

    pub fn k(&self) -> &CMatrix {
        &self.k
    }

    pub fn kbar(&self) -> &CMatrix {
        &self.kbar
    }

    pub fn kbar_inv(&self) -> &CMatrix {
        &self.kbar_inv
    }

    /// Copy with `sqrt(h_n)` negated wherever `flips[n]` is set. Flipping
    /// changes the signs of `P_n`, `S_n` and their transforms together.
    pub fn with_flipped_roots(&self, flips: &[bool]) -> Self {
        let mut out = self.clone();
        for (r, &f) in out.sqrt_h.iter_mut().zip(flips) {
            if f {
                *r = -*r;
            }
        }
        out
    }

    fn check_index(&self, n: i64) -> Result<usize> {
        if n >= self.truncation() as i64 {
            return Err(Error::Truncation {
                index: n,
                trunc: self.truncation(),
            });
        }
        Ok(n as usize)
    }

    fn negative_power(n: i64, z: Complex64) -> Result<Complex64> {
        if z == c(0.0) {
            return Err(Error::PoleProximity {
                point: z,
                other: c(0.0),
                what: "the origin, where a negative power",
                eps: 0.0,
            });
        }
        Ok(z.powi(n as i32))
    }

    pub fn p(&self, n: i64, x: Complex64) -> Result<Complex64> {
        if n < 0 {
            return Self::negative_power(n, x);
        }
        let n = self.check_index(n)?;
        let mut acc = c(0.0);
        for m in (0..=n).rev() {
            acc = acc * x + self.k[(n, m)];
        }
        Ok(acc / self.sqrt_h[n])
    }

    pub fn s(&self, n: i64, y: Complex64) -> Result<Complex64> {
        if n < 0 {
            return Self::negative_power(n, y);
        }
        let n = self.check_index(n)?;
        let mut acc = c(0.0);
        for m in (0..=n).rev() {
            acc = acc * y + self.kbar_inv[(m, n)];
        }
        Ok(acc / self.sqrt_h[n])
    }

    /// `sum_atoms w P_n(x) / (mu - y)`; `mu^{-n-1}` for negative `n`.
    pub fn p_tilde(&self, m: &Measure, n: i64, mu: Complex64, eps_pole: f64) -> Result<Complex64> {
        if n < 0 {
            return Ok(mu.powi((-n - 1) as i32));
        }
        self.check_index(n)?;
        let mut acc = ComplexSum::new();
        for a in m.atoms() {
            check_pole(mu, a.y, eps_pole, "the y-support at")?;
            acc.add(a.w * self.p(n, a.x)? / (mu - a.y));
        }
        Ok(acc.value())
    }

    /// `sum_atoms w S_n(y) / (eta - x)`; `eta^{-n-1}` for negative `n`.
    pub fn s_tilde(&self, m: &Measure, n: i64, eta: Complex64, eps_pole: f64) -> Result<Complex64> {
        if n < 0 {
            return Ok(eta.powi((-n - 1) as i32));
        }
        self.check_index(n)?;
        let mut acc = ComplexSum::new();
        for a in m.atoms() {
            check_pole(eta, a.x, eps_pole, "the x-support at")?;
            acc.add(a.w * self.s(n, a.y)? / (eta - a.x));
        }
        Ok(acc.value())
    }

    /// `Stilde_n(eta)` through the column identity
    /// `K^{-1} H = B Kbar^{-1}`: the geometric series
    /// `(1/sqrt h_n) sum_{j<terms} eta^{-j-1} (B Kbar^{-1})_{jn}`, with
    /// bimoment rows beyond `T` taken from the measure. Converges for
    /// `|eta|` larger than every `|x|` in the support.
    pub fn s_tilde_series(&self, m: &Measure, n: usize, eta: Complex64, terms: usize) -> Result<Complex64> {
        self.check_index(n as i64)?;
        let mut acc = ComplexSum::new();
        let inv = eta.inv();
        let mut pow = inv;
        for j in 0..terms {
            let mut col = ComplexSum::new();
            for kk in 0..=n {
                col.add(m.bimoment(j, kk)? * self.kbar_inv[(kk, n)]);
            }
            acc.add(pow * col.value());
            pow *= inv;
        }
        Ok(acc.value() / self.sqrt_h[n])
    }

    /// Mirror of [`Self::s_tilde_series`] through `H Kbar = K B`.
    pub fn p_tilde_series(&self, m: &Measure, n: usize, mu: Complex64, terms: usize) -> Result<Complex64> {
        self.check_index(n as i64)?;
        let mut acc = ComplexSum::new();
        let inv = mu.inv();
        let mut pow = inv;
        for j in 0..terms {
            let mut row = ComplexSum::new();
            for kk in 0..=n {
                row.add(self.k[(n, kk)] * m.bimoment(kk, j)?);
            }
            acc.add(pow * row.value());
            pow *= inv;
        }
        Ok(acc.value() / self.sqrt_h[n])
    }

    /// Max-entry residual of `K^{-1} H - B Kbar^{-1}` on the leading
    /// block, relative to the largest bimoment.
    pub fn factorization_residual(&self, b: &BimomentMatrix) -> f64 {
        let t = self.truncation();
        let bt = b.entries().view((0, 0), (t, t)).into_owned();
        let k_inv = unit_lower_inverse(&self.k);
        let h = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.h.clone()));
        let lhs = k_inv * h;
        let rhs = &bt * &self.kbar_inv;
        max_abs(&(lhs - rhs)) / max_abs(&bt).max(f64::MIN_POSITIVE)
    }

    /// `max_{j,k<T} |sum_atoms w P_j(x) S_k(y) - delta_jk|`.
    pub fn orthonormality_residual(&self, m: &Measure) -> Result<f64> {
        let t = self.truncation();
        let mut pv = Vec::with_capacity(m.len());
        let mut sv = Vec::with_capacity(m.len());
        for a in m.atoms() {
            pv.push((0..t as i64).map(|n| self.p(n, a.x)).collect::<Result<Vec<_>>>()?);
            sv.push((0..t as i64).map(|n| self.s(n, a.y)).collect::<Result<Vec<_>>>()?);
        }
        let mut worst = 0.0_f64;
        for j in 0..t {
            for k in 0..t {
                let mut acc = ComplexSum::new();
                for (ai, a) in m.atoms().iter().enumerate() {
                    acc.add(a.w * pv[ai][j] * sv[ai][k]);
                }
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((acc.value() - c(target)).norm());
            }
        }
        Ok(worst)
    }

    /// `prod_{n<count} h_n`.
    pub fn norm_product(&self, count: usize) -> Result<Complex64> {
        (0..count as i64).try_fold(c(1.0), |acc, n| Ok(acc * self.h(n)?))
    }
}

pub(crate) fn check_pole(point: Complex64, other: Complex64, eps: f64, what: &'static str) -> Result<()> {
    if (point - other).norm() <= eps {
        return Err(Error::PoleProximity {
            point,
            other,
            what,
            eps,
        });
    }
    Ok(())
}

fn unit_lower_inverse(l: &CMatrix) -> CMatrix {
    let n = l.nrows();
    let mut inv = CMatrix::identity(n, n);
    for col in 0..n {
        for i in col + 1..n {
            let mut acc = ComplexSum::new();
            for kk in col..i {
                acc.add(l[(i, kk)] * inv[(kk, col)]);
            }
            inv[(i, col)] = -acc.value();
        }
    }
    inv
}

fn unit_upper_inverse(u: &CMatrix) -> CMatrix {
    let n = u.nrows();
    let mut inv = CMatrix::identity(n, n);
    for col in 0..n {
        for i in (0..col).rev() {
            let mut acc = ComplexSum::new();
            for kk in i + 1..=col {
                acc.add(u[(i, kk)] * inv[(kk, col)]);
            }
            inv[(i, col)] = -acc.value();
        }
    }
    inv
}
