//! Turns on the time V(x) = 0.1 x and checks that the single-xi
//! integral is still sqrt(h_N) P_N(xi) for the deformed system.

use twomat::evaluator::evaluate;
use twomat::oracle::{brute_force_in, DEFAULT_TERM_BUDGET};
use twomat::sampling::reference_measure;
use twomat::{BiorthoSystem, Complex64, InsertionSpec, KernelContext};

fn main() -> twomat::Result<()> {
    let t1 = [Complex64::new(0.0, 0.0), Complex64::new(0.1, 0.0)];
    let m = reference_measure().deform(&t1, &[])?;
    let sys = BiorthoSystem::from_measure(&m, 8)?;
    let ctx = KernelContext::new(&sys, &m);
    let xi = Complex64::new(3.8, 1.3);
    for n in 1..=4 {
        let spec = InsertionSpec::new(n).with_xi(vec![xi]);
        let closed = sys.sqrt_h(n as i64)? * sys.p(n as i64, xi)?;
        let brute = brute_force_in(&m, &spec, DEFAULT_TERM_BUDGET)?.value;
        let fast = evaluate(&spec, &ctx)?.value;
        println!(
            "N={n}: sqrt(h_N) P_N = {closed:.12}  brute rel {:.1e}  eval rel {:.1e}",
            (closed - brute).norm() / brute.norm(),
            (fast - brute).norm() / brute.norm()
        );
    }
    Ok(())
}
