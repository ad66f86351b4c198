use twomat::wick::{
    cauchy_vev, rational_vev_check, two_component_check, vandermonde_check, TwoComponentPoints, DEFAULT_STATE_BUDGET,
    DEFAULT_WINDOW,
};
use twomat::Complex64;

fn main() -> twomat::Result<()> {
    let z = Complex64::new;
    let w = DEFAULT_WINDOW;

    let xs = [z(1.2, 0.3), z(-0.8, 1.1), z(0.5, -1.4)];
    let v = vandermonde_check(&xs, w, DEFAULT_STATE_BUDGET)?;
    println!("<3|f f f|0>        = {:.15}  closed form {:.15}", v.engine, v.closed_form);

    for (x, y) in [(2.0, 0.5), (2.0, 1.0), (2.0, 1.8)] {
        for window in [8, 64] {
            let got = cauchy_vev(z(x, 0.0), z(y, 0.0), window)?;
            println!("<0|f({x}) fbar({y})|0>, W = {window:>2}: {:.15} (exact {:.15})", got.re, 1.0 / (x - y));
        }
    }

    let r = rational_vev_check(&[z(2.0, 1.0), z(-1.8, 1.6)], &[z(0.3, -0.2), z(-0.4, 0.1)], w, DEFAULT_STATE_BUDGET)?;
    println!("Cauchy determinant 2x2: residual {:.2e} (bound {:.2e})", r.residual, r.bound);

    let p = TwoComponentPoints {
        x1: vec![z(2.2, 0.4), z(-1.9, 1.5)],
        y1: vec![z(0.3, 0.2)],
        x2: vec![z(0.5, -2.6)],
        y2: vec![z(-0.4, 0.1), z(0.2, -0.5)],
    };
    let t = two_component_check(&p, w, DEFAULT_STATE_BUDGET)?;
    println!("two components:     {:.12} vs {:.12}", t.engine, t.closed_form);
    Ok(())
}
