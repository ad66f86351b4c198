use num_complex::Complex64;
use rand::Rng;
use twomat::sampling::rng;
use twomat::wick::*;

fn point(r: &mut impl Rng, lo: f64, hi: f64) -> Complex64 {
    Complex64::from_polar(r.gen_range(lo..hi), r.gen_range(0.0..std::f64::consts::TAU))
}

fn random_combo(r: &mut impl Rng, kind: Kind, lo: i64, hi: i64) -> LinearCombo {
    LinearCombo::from_terms(
        kind,
        (lo..hi).map(|i| (i, Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))),
    )
}

#[test]
fn two_component_sign_for_all_small_counts() {
    let mut r = rng(11);
    for n1 in 0..=2 {
        for m1 in 0..=2 {
            for n2 in 0..=2 {
                for m2 in 0..=2 {
                    let p = TwoComponentPoints {
                        x1: (0..n1).map(|_| point(&mut r, 2.0, 3.0)).collect(),
                        y1: (0..m1).map(|_| point(&mut r, 0.1, 0.9)).collect(),
                        x2: (0..n2).map(|_| point(&mut r, 2.0, 3.0)).collect(),
                        y2: (0..m2).map(|_| point(&mut r, 0.1, 0.9)).collect(),
                    };
                    let c = two_component_check(&p, DEFAULT_WINDOW, DEFAULT_STATE_BUDGET).unwrap();
                    assert!(c.passed(), "({n1},{m1},{n2},{m2}) {c:?}");
                }
            }
        }
    }
}

#[test]
fn determinant_form_matches_pairings() {
    let mut r = rng(5);
    for trial in 0..100 {
        let n = 1 + trial % 5;
        let charge = r.gen_range(-2..=2);
        let ws: Vec<_> = (0..n).map(|_| random_combo(&mut r, Kind::F, -6, 6)).collect();
        let wb: Vec<_> = (0..n).map(|_| random_combo(&mut r, Kind::FBar, -6, 6)).collect();
        let d = vev_det(&ws, &wb, charge).unwrap();
        let g = vev_general(&block_word(&ws, &wb, charge), DEFAULT_STATE_BUDGET).unwrap();
        assert!((d - g).norm() <= 1e-12 * (1.0 + d.norm()), "{trial}: {d} vs {g}");
    }
}
