//! Factorizes the bimoments and checks that `P_j` and `S_k` are
//! biorthonormal under the measure.

use twomat::sampling::reference_measure;
use twomat::{BiorthoSystem, Complex64};

fn main() -> twomat::Result<()> {
    let m = reference_measure();
    let sys = BiorthoSystem::from_measure(&m, 6)?;
    for n in 0..6 {
        println!("h_{n} = {:.10}", sys.h(n)?);
    }
    let mut gram = [[Complex64::new(0.0, 0.0); 6]; 6];
    for a in m.atoms() {
        for (j, row) in gram.iter_mut().enumerate() {
            for (k, g) in row.iter_mut().enumerate() {
                *g += a.w * sys.p(j as i64, a.x)? * sys.s(k as i64, a.y)?;
            }
        }
    }
    let off = (0..6)
        .flat_map(|j| (0..6).map(move |k| (j, k)))
        .map(|(j, k)| (gram[j][k] - if j == k { 1.0 } else { 0.0 }).norm())
        .fold(0.0, f64::max);
    println!("max |<P_j, S_k> - delta_jk| = {off:.3e}");
    println!("factorization residual     = {:.3e}", sys.factorization_residual(&m.bimoment_matrix(6)?));
    Ok(())
}
