//! Seeded generators for test measures and insertion specs.

use crate::error::Result;
use crate::evaluator::{CaseKind, InsertionSpec};
use crate::measure::{Atom, Measure};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

pub const DEFAULT_SEED: u64 = 20_240_917;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Atoms scattered around the unit circle with a shuffled pairing of the
/// `x` and `y` angles. Bimoment matrices of this family stay well
/// conditioned up to order 8 or so when `atoms >= 12`.
pub fn jittered_circle(atoms: usize, seed: u64) -> Result<Measure> {
    let mut r = rng(seed);
    let mut perm: Vec<usize> = (0..atoms).collect();
    perm.shuffle(&mut r);
    let point = |r: &mut ChaCha8Rng, a: usize| {
        let theta = 2.0 * PI * (a as f64 + 0.3 * r.gen::<f64>()) / atoms as f64;
        Complex64::from_polar(0.8 + 0.4 * r.gen::<f64>(), theta)
    };
    let mut out = Vec::with_capacity(atoms);
    for (a, &pa) in perm.iter().enumerate() {
        let x = point(&mut r, a);
        let y = point(&mut r, pa);
        let g: f64 = r.sample(StandardNormal);
        let w = Complex64::from_polar(0.5 + r.gen::<f64>(), 0.5 * g);
        out.push(Atom::new(x, y, w));
    }
    Measure::new(format!("jittered-circle-{atoms}-{seed}"), out)
}

/// The measure used by the acceptance checks.
pub fn reference_measure() -> Measure {
    jittered_circle(12, DEFAULT_SEED).expect("reference measure is valid")
}

/// A point of modulus about 4, well away from the unit-disc support.
pub fn far_point(r: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(3.5 + r.gen::<f64>(), 2.0 * PI * r.gen::<f64>())
}

fn far_points(r: &mut impl Rng, count: usize) -> Vec<Complex64> {
    (0..count).map(|_| far_point(r)).collect()
}

/// Random spec with `1 <= N <= max_n` and each insertion count in
/// `0..=max_count`.
pub fn random_spec(r: &mut impl Rng, max_n: usize, max_count: usize) -> InsertionSpec {
    let n = r.gen_range(1..=max_n);
    let mut counts = [0usize; 4];
    for c in &mut counts {
        *c = r.gen_range(0..=max_count);
    }
    InsertionSpec::new(n)
        .with_xi(far_points(r, counts[0]))
        .with_zeta(far_points(r, counts[1]))
        .with_eta(far_points(r, counts[2]))
        .with_mu(far_points(r, counts[3]))
}

/// Rejection-samples a spec whose `(N1, N2)` lies in the regime of
/// `kind`. The regime need not be the canonical one: with small counts
/// some regimes only occur on boundaries shared with others.
pub fn random_spec_for_case(r: &mut impl Rng, kind: CaseKind, max_n: usize, max_count: usize) -> InsertionSpec {
    loop {
        let s = random_spec(r, max_n, max_count);
        let k = s.counts();
        if kind.applies(k.n1(), k.n2()) {
            return s;
        }
    }
}

/// `per_case` specs for each of the six cases, in case order.
pub fn stratified_specs(seed: u64, per_case: usize, max_n: usize, max_count: usize) -> Vec<InsertionSpec> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(6 * per_case);
    for kind in CaseKind::ALL {
        for _ in 0..per_case {
            out.push(random_spec_for_case(&mut r, kind, max_n, max_count));
        }
    }
    out
}
