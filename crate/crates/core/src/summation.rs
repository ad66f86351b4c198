//! Compensated accumulation.
//!
//! All finite sums over atoms go through [`ComplexSum`], which runs a
//! Neumaier (improved Kahan–Babuška) accumulator on the real and
//! imaginary parts independently. Summation order is the iteration order
//! of the caller, so results are reproducible bit for bit.

use num_complex::Complex64;
use std::iter::Sum;
use std::ops::AddAssign;

#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    /// Merge a partial accumulator. Used when partitions of a sum are
    /// computed separately and combined in a fixed order.
    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.add(other.re.sum);
        self.re.add(other.re.comp);
        self.im.add(other.im.sum);
        self.im.add(other.im.comp);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl AddAssign<Complex64> for ComplexSum {
    fn add_assign(&mut self, rhs: Complex64) {
        self.add(rhs);
    }
}

impl Sum<Complex64> for ComplexSum {
    fn sum<I: Iterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexSum::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Compensated sum of a sequence of complex numbers.
pub fn complex_sum<I: IntoIterator<Item = Complex64>>(items: I) -> Complex64 {
    items.into_iter().sum::<ComplexSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let mut s = NeumaierSum::new();
        for v in [1.0, 1e100, 1.0, -1e100] {
            s.add(v);
        }
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<Complex64> = (0..1000)
            .map(|i| Complex64::new((i as f64 * 0.37).sin() * 1e8, (i as f64).cos()))
            .collect();
        let whole = complex_sum(xs.iter().copied());
        let mut acc = ComplexSum::new();
        for chunk in xs.chunks(97) {
            let part: ComplexSum = chunk.iter().copied().sum();
            acc.merge(&part);
        }
        assert!((acc.value() - whole).norm() <= 1e-16 * whole.norm().max(1.0) * 4.0);
    }
}
