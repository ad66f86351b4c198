//! On the boundary N1 = N2 = 0 several determinant formulas apply at
//! once. They have different sizes but give the same number.

use twomat::evaluator::evaluate_all_applicable;
use twomat::sampling::reference_measure;
use twomat::{BiorthoSystem, Complex64, InsertionSpec, KernelContext};

fn main() -> twomat::Result<()> {
    let m = reference_measure();
    let sys = BiorthoSystem::from_measure(&m, 8)?;
    let ctx = KernelContext::new(&sys, &m);
    let spec = InsertionSpec::new(1)
        .with_eta(vec![Complex64::new(-3.5, -2.0)])
        .with_mu(vec![Complex64::new(2.2, 3.5)]);
    for r in evaluate_all_applicable(&spec, &ctx)? {
        println!("{:>4}: {}x{} determinant -> {:.15}", r.case.kind.name(), r.g.nrows(), r.g.ncols(), r.value);
    }
    Ok(())
}
