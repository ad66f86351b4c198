//! Truncated Christoffel–Darboux-type kernels and the double Hilbert
//! kernel `H(mu, eta)`.
//!
//! Each kernel is a finite sum over `n < J` plus a closed-form pole
//! term; the two parts are computed separately and then added.
//!
//! Several labelings of the same four kernels are in use in the
//! literature (the labels also swap between the direct and mirrored
//! cases). The functions here are named by content instead:
//!
//! | function               | value                                           |
//! |------------------------|-------------------------------------------------|
//! | `kernel_ps`            | `sum P_n(xi) S_n(zeta)`                         |
//! | `kernel_ps_tilde`      | `sum P_n(xi) Stilde_n(eta) + 1/(xi - eta)`      |
//! | `kernel_ptilde_s`      | `sum Ptilde_n(mu) S_n(zeta) + 1/(zeta - mu)`    |
//! | `kernel_ptilde_stilde` | `sum Ptilde_n(mu) Stilde_n(eta) - H(mu, eta)`   |

use crate::biortho::{check_pole, BiorthoSystem, DEFAULT_EPS_POLE};
use crate::error::{Error, Result};
use crate::linalg::c;
use crate::measure::Measure;
use crate::summation::ComplexSum;
use num_complex::Complex64;

/// Everything a kernel evaluation needs: polynomials, their transforms
/// and the double Hilbert kernel. Implemented by [`KernelContext`] and by
/// its `x <-> y` mirror [`Mirrored`].
pub trait BiorthoView {
    fn truncation(&self) -> usize;
    fn eps_pole(&self) -> f64;
    fn h(&self, n: i64) -> Result<Complex64>;
    fn sqrt_h(&self, n: i64) -> Result<Complex64>;
    fn p(&self, n: i64, x: Complex64) -> Result<Complex64>;
    fn s(&self, n: i64, y: Complex64) -> Result<Complex64>;
    fn p_tilde(&self, n: i64, mu: Complex64) -> Result<Complex64>;
    fn s_tilde(&self, n: i64, eta: Complex64) -> Result<Complex64>;
    /// `sum_atoms w / ((eta - x)(mu - y))`
    fn h_kernel(&self, mu: Complex64, eta: Complex64) -> Result<Complex64>;

    fn check_order(&self, j: usize) -> Result<()> {
        if j > self.truncation() {
            return Err(Error::Truncation {
                index: j as i64 - 1,
                trunc: self.truncation(),
            });
        }
        Ok(())
    }

    fn kernel_ps(&self, j: usize, xi: Complex64, zeta: Complex64) -> Result<Complex64> {
        self.check_order(j)?;
        let mut acc = ComplexSum::new();
        for n in 0..j as i64 {
            acc.add(self.p(n, xi)? * self.s(n, zeta)?);
        }
        Ok(acc.value())
    }

    fn kernel_ps_tilde(&self, j: usize, xi: Complex64, eta: Complex64) -> Result<Complex64> {
        self.check_order(j)?;
        check_pole(xi, eta, self.eps_pole(), "the pole")?;
        let mut acc = ComplexSum::new();
        for n in 0..j as i64 {
            acc.add(self.p(n, xi)? * self.s_tilde(n, eta)?);
        }
        Ok(acc.value() + c(1.0) / (xi - eta))
    }

    fn kernel_ptilde_s(&self, j: usize, mu: Complex64, zeta: Complex64) -> Result<Complex64> {
        self.check_order(j)?;
        check_pole(zeta, mu, self.eps_pole(), "the pole")?;
        let mut acc = ComplexSum::new();
        for n in 0..j as i64 {
            acc.add(self.p_tilde(n, mu)? * self.s(n, zeta)?);
        }
        Ok(acc.value() + c(1.0) / (zeta - mu))
    }

    fn kernel_ptilde_stilde(&self, j: usize, mu: Complex64, eta: Complex64) -> Result<Complex64> {
        self.check_order(j)?;
        let hk = self.h_kernel(mu, eta)?;
        let mut acc = ComplexSum::new();
        for n in 0..j as i64 {
            acc.add(self.p_tilde(n, mu)? * self.s_tilde(n, eta)?);
        }
        Ok(acc.value() - hk)
    }
}

/// A biorthogonal system together with the measure it was built from.
#[derive(Debug, Clone, Copy)]
pub struct KernelContext<'a> {
    pub sys: &'a BiorthoSystem,
    pub measure: &'a Measure,
    pub eps_pole: f64,
}

impl<'a> KernelContext<'a> {
    pub fn new(sys: &'a BiorthoSystem, measure: &'a Measure) -> Self {
        KernelContext {
            sys,
            measure,
            eps_pole: DEFAULT_EPS_POLE,
        }
    }

    pub fn with_eps_pole(mut self, eps: f64) -> Self {
        self.eps_pole = eps;
        self
    }
}

impl BiorthoView for KernelContext<'_> {
    fn truncation(&self) -> usize {
        self.sys.truncation()
    }

    fn eps_pole(&self) -> f64 {
        self.eps_pole
    }

    fn h(&self, n: i64) -> Result<Complex64> {
        self.sys.h(n)
    }

    fn sqrt_h(&self, n: i64) -> Result<Complex64> {
        self.sys.sqrt_h(n)
    }

    fn p(&self, n: i64, x: Complex64) -> Result<Complex64> {
        self.sys.p(n, x)
    }

    fn s(&self, n: i64, y: Complex64) -> Result<Complex64> {
        self.sys.s(n, y)
    }

    fn p_tilde(&self, n: i64, mu: Complex64) -> Result<Complex64> {
        self.sys.p_tilde(self.measure, n, mu, self.eps_pole)
    }

    fn s_tilde(&self, n: i64, eta: Complex64) -> Result<Complex64> {
        self.sys.s_tilde(self.measure, n, eta, self.eps_pole)
    }

    fn h_kernel(&self, mu: Complex64, eta: Complex64) -> Result<Complex64> {
        let mut acc = ComplexSum::new();
        for a in self.measure.atoms() {
            check_pole(eta, a.x, self.eps_pole, "the x-support at")?;
            check_pole(mu, a.y, self.eps_pole, "the y-support at")?;
            acc.add(a.w / ((eta - a.x) * (mu - a.y)));
        }
        Ok(acc.value())
    }
}

/// The same system seen through the transposed measure
/// `dmu(x, y) -> dmu(y, x)`: `P <-> S`, `Ptilde <-> Stilde`, and
/// `H(mu, eta) -> H(eta, mu)`.
#[derive(Debug, Clone, Copy)]
pub struct Mirrored<V>(pub V);

impl<V: BiorthoView> BiorthoView for Mirrored<V> {
    fn truncation(&self) -> usize {
        self.0.truncation()
    }

    fn eps_pole(&self) -> f64 {
        self.0.eps_pole()
    }

    fn h(&self, n: i64) -> Result<Complex64> {
        self.0.h(n)
    }

    fn sqrt_h(&self, n: i64) -> Result<Complex64> {
        self.0.sqrt_h(n)
    }

    fn p(&self, n: i64, x: Complex64) -> Result<Complex64> {
        self.0.s(n, x)
    }

    fn s(&self, n: i64, y: Complex64) -> Result<Complex64> {
        self.0.p(n, y)
    }

    fn p_tilde(&self, n: i64, mu: Complex64) -> Result<Complex64> {
        self.0.s_tilde(n, mu)
    }

    fn s_tilde(&self, n: i64, eta: Complex64) -> Result<Complex64> {
        self.0.p_tilde(n, eta)
    }

    fn h_kernel(&self, mu: Complex64, eta: Complex64) -> Result<Complex64> {
        self.0.h_kernel(eta, mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;

    fn single() -> (Measure, BiorthoSystem) {
        let m = Measure::new("s", [Atom::new(c(2.0), c(3.0), c(5.0))]).unwrap();
        let sys = BiorthoSystem::from_measure(&m, 1).unwrap();
        (m, sys)
    }

    #[test]
    fn empty_sums_leave_pole_terms() {
        let (m, sys) = single();
        let ctx = KernelContext::new(&sys, &m);
        assert_eq!(ctx.kernel_ps(0, c(1.0), c(1.0)).unwrap(), c(0.0));
        assert_eq!(ctx.kernel_ps_tilde(0, c(2.5), c(1.5)).unwrap(), c(1.0));
        assert_eq!(ctx.kernel_ptilde_s(0, c(1.0), c(3.5)).unwrap(), c(0.4));
        // -5 / ((4-2)(4-3))
        assert_eq!(ctx.kernel_ptilde_stilde(0, c(4.0), c(4.0)).unwrap(), c(-2.5));
    }

    #[test]
    fn first_order_kernel_is_inverse_norm() {
        let (m, sys) = single();
        let ctx = KernelContext::new(&sys, &m);
        let v = ctx.kernel_ps(1, c(0.3), c(-7.0)).unwrap();
        assert!((v - c(0.2)).norm() < 1e-15);
    }

    #[test]
    fn h_kernel_single_atom_and_linearity() {
        let m = Measure::new("z", [Atom::new(c(0.0), c(0.0), c(1.0))]).unwrap();
        let sys = BiorthoSystem::from_measure(&m, 1).unwrap();
        let ctx = KernelContext::new(&sys, &m);
        assert!((ctx.h_kernel(c(5.0), c(2.0)).unwrap() - c(0.1)).norm() < 1e-16);
        let m2 = m.scaled(c(2.0)).unwrap();
        let ctx2 = KernelContext::new(&sys, &m2);
        assert!((ctx2.h_kernel(c(5.0), c(2.0)).unwrap() - c(0.2)).norm() < 1e-16);
    }

    #[test]
    fn kernel_errors() {
        let (m, sys) = single();
        let ctx = KernelContext::new(&sys, &m);
        assert!(matches!(ctx.kernel_ps(2, c(1.0), c(1.0)), Err(Error::Truncation { .. })));
        assert!(matches!(
            ctx.kernel_ps_tilde(0, c(1.0), c(1.0)),
            Err(Error::PoleProximity { .. })
        ));
        assert!(matches!(
            ctx.kernel_ptilde_stilde(0, c(3.0), c(5.0)),
            Err(Error::PoleProximity { .. })
        ));
    }

    #[test]
    fn mirror_swaps_roles() {
        let m = Measure::new(
            "m",
            [
                Atom::new(c(1.0), c(-1.0), c(1.0)),
                Atom::new(c(0.5), c(2.0), c(0.7)),
            ],
        )
        .unwrap();
        let sys = BiorthoSystem::from_measure(&m, 2).unwrap();
        let ctx = KernelContext::new(&sys, &m);
        let mir = Mirrored(ctx);
        let (a, b) = (c(4.0), c(-3.0));
        assert_eq!(mir.p(1, a).unwrap(), ctx.s(1, a).unwrap());
        assert_eq!(mir.s_tilde(1, a).unwrap(), ctx.p_tilde(1, a).unwrap());
        assert_eq!(mir.h_kernel(a, b).unwrap(), ctx.h_kernel(b, a).unwrap());
    }
}
