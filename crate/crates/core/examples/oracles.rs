//! The evaluator against the two reference routes: the literal N-fold
//! sum over atoms and the N x N determinant of modified bimoments. Also
//! prints the partition function three ways.

use twomat::evaluator::evaluate;
use twomat::oracle::{brute_force_in, detn_in, partition_z, DEFAULT_TERM_BUDGET};
use twomat::sampling::{random_spec, reference_measure, rng, DEFAULT_SEED};
use twomat::{BiorthoSystem, KernelContext};

fn main() -> twomat::Result<()> {
    let m = reference_measure();
    let sys = BiorthoSystem::from_measure(&m, 8)?;
    let ctx = KernelContext::new(&sys, &m);
    let mut r = rng(DEFAULT_SEED);
    for _ in 0..5 {
        let spec = random_spec(&mut r, 4, 2);
        let brute = brute_force_in(&m, &spec, DEFAULT_TERM_BUDGET)?;
        let det = detn_in(&m, &spec)?;
        let fast = evaluate(&spec, &ctx)?;
        let k = spec.counts();
        println!(
            "N={} L=({},{}) M=({},{})  {:>4}  |eval-brute|/|brute| = {:.1e}  |detN-brute|/|brute| = {:.1e}  ({} terms)",
            k.n, k.l1, k.l2, k.m1, k.m2,
            fast.case.kind.name(),
            (fast.value - brute.value).norm() / brute.value.norm(),
            (det.value - brute.value).norm() / brute.value.norm(),
            brute.terms,
        );
    }
    for n in 1..=4 {
        let z = partition_z(&m, n, DEFAULT_TERM_BUDGET)?;
        println!("Z_{n}: brute {:.10}  N!det B {:.10}  N!prod h {:.10}", z.brute, z.det_b, z.norm_product);
    }
    Ok(())
}
