//! Evaluates a ratio of characteristic polynomials with all four kinds of
//! insertion and prints the determinant report.

use twomat::evaluator::evaluate;
use twomat::sampling::reference_measure;
use twomat::{BiorthoSystem, Complex64, InsertionSpec, KernelContext};

fn main() -> twomat::Result<()> {
    let m = reference_measure();
    let sys = BiorthoSystem::from_measure(&m, 8)?;
    let ctx = KernelContext::new(&sys, &m);
    let z = Complex64::new;
    let spec = InsertionSpec::new(3)
        .with_xi(vec![z(3.7, 1.5)])
        .with_zeta(vec![z(-3.9, 1.0), z(1.2, -4.1)])
        .with_eta(vec![z(0.8, 4.0), z(-3.2, -2.6)])
        .with_mu(vec![z(4.3, -0.4)]);
    let r = evaluate(&spec, &ctx)?;
    println!("case {} (N1 = {}, N2 = {})", r.case.kind.name(), r.case.n1, r.case.n2);
    println!("G is {}x{}, det G = {:.12}", r.g.nrows(), r.g.ncols(), r.det_g);
    println!("prefactor = {:.12}, sign = {}", r.prefactor, r.sign);
    println!("I_N = {:.15}", r.value);
    println!("condition estimate {:.3e}", r.condition);
    Ok(())
}
