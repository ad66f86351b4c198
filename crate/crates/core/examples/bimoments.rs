//! Bimoment matrix of the reference measure and its leading minors.

use twomat::sampling::reference_measure;

fn main() -> twomat::Result<()> {
    let m = reference_measure();
    let b = m.bimoment_matrix(4)?;
    println!("B_jk = sum w x^j y^k over {} atoms", m.len());
    for j in 0..4 {
        let row: Vec<String> = (0..4).map(|k| format!("{:>22.6}", b.entries()[(j, k)])).collect();
        println!("  {}", row.join(" "));
    }
    for (t, d) in b.leading_minors().iter().enumerate() {
        println!("det B[..{}] = {:.6e}", t + 1, d);
    }
    Ok(())
}
