use num_complex::Complex64;
use proptest::prelude::*;
use twomat::biortho::BiorthoSystem;
use twomat::evaluator::{evaluate, InsertionSpec};
use twomat::kernels::KernelContext;
use twomat::measure::{Atom, Measure};
use twomat::sampling::reference_measure;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(re, im)| Complex64::new(re, im))
}

fn measure(atoms: usize) -> impl Strategy<Value = Measure> {
    prop::collection::vec((complex(), complex(), complex()), atoms)
        .prop_filter_map("duplicate atoms", |v| {
            Measure::new("prop", v.into_iter().map(|(x, y, w)| Atom::new(x, y, w))).ok()
        })
}

fn far() -> impl Strategy<Value = Complex64> {
    (3.5f64..4.5, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bimoments_are_linear_in_the_weights(m in measure(6), j in 0usize..5, k in 0usize..5) {
        let doubled = m.scaled(Complex64::new(2.0, 0.0)).unwrap();
        let (a, b) = (m.bimoment(j, k).unwrap(), doubled.bimoment(j, k).unwrap());
        prop_assert!((b - 2.0 * a).norm() <= 1e-14 * (1.0 + a.norm()));
    }

    #[test]
    fn rank_never_exceeds_atom_count(m in measure(3)) {
        prop_assert!(BiorthoSystem::from_measure(&m, 5).is_err());
    }

    #[test]
    fn zero_times_leave_the_measure_alone(m in measure(5), len in 0usize..4) {
        let zeros = vec![Complex64::new(0.0, 0.0); len];
        let d = m.deform(&zeros, &zeros).unwrap();
        prop_assert_eq!(d.atoms(), m.atoms());
    }

    #[test]
    fn evaluation_ignores_root_branches(flips in prop::collection::vec(any::<bool>(), 8),
                                        xi in far(), zeta in far(), eta in far(), mu in far()) {
        let m = reference_measure();
        let sys = BiorthoSystem::from_measure(&m, 8).unwrap();
        let flipped = sys.with_flipped_roots(&flips);
        let spec = InsertionSpec::new(3).with_xi(vec![xi]).with_zeta(vec![zeta]).with_eta(vec![eta]).with_mu(vec![mu]);
        let a = evaluate(&spec, &KernelContext::new(&sys, &m)).unwrap().value;
        let b = evaluate(&spec, &KernelContext::new(&flipped, &m)).unwrap().value;
        prop_assert!((a - b).norm() <= 1e-10 * a.norm());
    }

    #[test]
    fn swapping_two_zetas_changes_nothing(z1 in far(), z2 in far(), eta in far()) {
        prop_assume!((z1 - z2).norm() > 0.1);
        let m = reference_measure();
        let sys = BiorthoSystem::from_measure(&m, 8).unwrap();
        let ctx = KernelContext::new(&sys, &m);
        let a = evaluate(&InsertionSpec::new(2).with_zeta(vec![z1, z2]).with_eta(vec![eta]), &ctx).unwrap().value;
        let b = evaluate(&InsertionSpec::new(2).with_zeta(vec![z2, z1]).with_eta(vec![eta]), &ctx).unwrap().value;
        prop_assert!((a - b).norm() <= 1e-10 * a.norm());
    }
}
