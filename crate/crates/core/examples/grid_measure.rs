//! A tensor Gauss-Legendre grid on [-1, 1]^2 with weight e^{xy}, built
//! from a measure document, then used like any other measure.

use twomat::evaluator::evaluate;
use twomat::io::parse_measure;
use twomat::{BiorthoSystem, Complex64, InsertionSpec, KernelContext};

fn main() -> twomat::Result<()> {
    let m = parse_measure(
        r#"{"label": "gl8-expxy",
            "grid": {"x_nodes": {"gauss_legendre": {"n": 8}},
                     "y_nodes": {"gauss_legendre": {"n": 8}},
                     "weight": "exp_xy"}}"#,
    )?;
    println!("{} atoms, B_00 = {:.15}", m.len(), m.bimoment(0, 0)?.re);
    let sys = BiorthoSystem::from_measure(&m, 6)?;
    let ctx = KernelContext::new(&sys, &m);
    let spec = InsertionSpec::new(4)
        .with_xi(vec![Complex64::new(1.5, 0.5)])
        .with_eta(vec![Complex64::new(-2.0, 0.0)]);
    let r = evaluate(&spec, &ctx)?;
    println!("I_4(xi, eta) = {:.15} via {}", r.value, r.case.kind.name());
    Ok(())
}
