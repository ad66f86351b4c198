//! Reference values for `I_N` and `Z_N` that do not go through the
//! biorthogonal machinery: the literal N-fold sum over atoms and the
//! `N x N` determinant of modified bimoments.

use crate::biortho::{check_pole, BiorthoSystem, DEFAULT_EPS_POLE};
use crate::error::{Error, Result};
use crate::evaluator::InsertionSpec;
use crate::linalg::{c, det, vandermonde, CMatrix};
use crate::measure::Measure;
use crate::summation::ComplexSum;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_TERM_BUDGET: u64 = 10_000_000;

/// Below this magnitude `Z_N` is treated as zero.
pub const DEGENERATE_Z: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMethod {
    Brute,
    DetN,
    Partition,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub value: Complex64,
    pub method: OracleMethod,
    /// Number of summed terms (tuples for the brute sum, atoms times
    /// matrix entries for the determinant route).
    pub terms: u64,
}

/// The rational insertion factor at each atom.
fn insertion_factors(m: &Measure, spec: &InsertionSpec, eps: f64) -> Result<Vec<Complex64>> {
    m.atoms()
        .iter()
        .map(|a| {
            let mut f = c(1.0);
            for &xi in &spec.xi {
                f *= xi - a.x;
            }
            for &z in &spec.zeta {
                f *= z - a.y;
            }
            for &e in &spec.eta {
                check_pole(e, a.x, eps, "the x-support at")?;
                f /= e - a.x;
            }
            for &mu in &spec.mu {
                check_pole(mu, a.y, eps, "the y-support at")?;
                f /= mu - a.y;
            }
            Ok(f)
        })
        .collect()
}

/// Sums `prod w_{a_i} Delta(x) Delta(y)` over ordered `N`-tuples, both
/// with and without the insertion factors. Partitions over the first
/// tuple index run in parallel and are merged in index order.
fn tuple_sums(m: &Measure, factors: &[Complex64], n: usize, distinct_only: bool) -> (Complex64, Complex64) {
    let atoms = m.atoms();
    let r = atoms.len();
    let partials: Vec<(ComplexSum, ComplexSum)> = (0..r)
        .into_par_iter()
        .map(|first| {
            let mut with = ComplexSum::new();
            let mut without = ComplexSum::new();
            let mut idx = vec![0usize; n];
            idx[0] = first;
            let mut xs = vec![c(0.0); n];
            let mut ys = vec![c(0.0); n];
            loop {
                let skip = distinct_only && (1..n).any(|i| idx[..i].contains(&idx[i]));
                if !skip {
                    let mut w = c(1.0);
                    let mut f = c(1.0);
                    for (slot, &a) in idx.iter().enumerate() {
                        w *= atoms[a].w;
                        f *= factors[a];
                        xs[slot] = atoms[a].x;
                        ys[slot] = atoms[a].y;
                    }
                    let base = w * vandermonde(&xs) * vandermonde(&ys);
                    without.add(base);
                    with.add(base * f);
                }
                // odometer over positions 1..n
                let mut pos = n;
                loop {
                    if pos == 1 {
                        return (with, without);
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < r {
                        break;
                    }
                    idx[pos] = 0;
                }
                if n == 1 {
                    return (with, without);
                }
            }
        })
        .collect();
    let mut with = ComplexSum::new();
    let mut without = ComplexSum::new();
    for (a, b) in &partials {
        with.merge(a);
        without.merge(b);
    }
    (with.value(), without.value())
}

fn check_budget(m: &Measure, n: usize, budget: u64) -> Result<u64> {
    let terms = (m.len() as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    if terms > budget {
        return Err(Error::Budget(format!(
            "brute sum needs {} atoms^{n} = {terms} terms, budget is {budget}",
            m.len()
        )));
    }
    Ok(terms)
}

/// Literal `(1/Z_N) sum_{tuples} ...` with `Z_N` from the same pass.
pub fn brute_force_in(m: &Measure, spec: &InsertionSpec, budget: u64) -> Result<OracleResult> {
    brute_force_in_with(m, spec, budget, false)
}

/// As [`brute_force_in`]; `distinct_only` skips tuples that repeat an
/// atom (their Vandermonde factor vanishes anyway).
pub fn brute_force_in_with(
    m: &Measure,
    spec: &InsertionSpec,
    budget: u64,
    distinct_only: bool,
) -> Result<OracleResult> {
    if spec.n == 0 {
        return Err(Error::Invalid("N must be at least 1".into()));
    }
    let terms = check_budget(m, spec.n, budget)?;
    let factors = insertion_factors(m, spec, DEFAULT_EPS_POLE)?;
    let (num, z) = tuple_sums(m, &factors, spec.n, distinct_only);
    if z.norm() < DEGENERATE_Z {
        return Err(Error::Degenerate(format!("Z_{} vanishes for this measure", spec.n)));
    }
    Ok(OracleResult {
        value: num / z,
        method: OracleMethod::Brute,
        terms,
    })
}

fn modified_bimoments(m: &Measure, factors: &[Complex64], n: usize) -> CMatrix {
    let mut a = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let mut acc = ComplexSum::new();
            for (atom, f) in m.atoms().iter().zip(factors) {
                acc.add(atom.w * f * atom.x.powu(j as u32) * atom.y.powu(k as u32));
            }
            a[(j, k)] = acc.value();
        }
    }
    a
}

/// `det[int f x^j y^k dmu] / det[int x^j y^k dmu]` over `0 <= j,k < N`.
pub fn detn_in(m: &Measure, spec: &InsertionSpec) -> Result<OracleResult> {
    if spec.n == 0 {
        return Err(Error::Invalid("N must be at least 1".into()));
    }
    let n = spec.n;
    let factors = insertion_factors(m, spec, DEFAULT_EPS_POLE)?;
    let ones = vec![c(1.0); m.len()];
    let den = det(&modified_bimoments(m, &ones, n));
    if den.norm() < DEGENERATE_Z {
        return Err(Error::SingularMinor {
            order: n,
            pivot: den.norm(),
            threshold: DEGENERATE_Z,
        });
    }
    let num = det(&modified_bimoments(m, &factors, n));
    Ok(OracleResult {
        value: num / den,
        method: OracleMethod::DetN,
        terms: (2 * n * n * m.len()) as u64,
    })
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// The three routes to `Z_N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionTriple {
    pub brute: Complex64,
    pub det_b: Complex64,
    pub norm_product: Complex64,
}

impl PartitionTriple {
    pub fn max_relative_spread(&self) -> f64 {
        crate::evaluator::max_relative_spread(&[self.brute, self.det_b, self.norm_product])
    }
}

/// `Z_N` by brute sum, by `N! det B_N`, and by `N! prod_{n<N} h_n`.
pub fn partition_z(m: &Measure, n: usize, budget: u64) -> Result<PartitionTriple> {
    if n == 0 {
        return Err(Error::Invalid("N must be at least 1".into()));
    }
    check_budget(m, n, budget)?;
    let ones = vec![c(1.0); m.len()];
    let (_, brute) = tuple_sums(m, &ones, n, false);
    let nf = factorial(n);
    let b = m.bimoment_matrix(n)?;
    let det_b = det(b.entries()) * nf;
    let sys = BiorthoSystem::factorize(&b, n)?;
    let norm_product = sys.norm_product(n)? * nf;
    Ok(PartitionTriple {
        brute,
        det_b,
        norm_product,
    })
}
