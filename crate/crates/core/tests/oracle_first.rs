//! Worked examples checked against reference computations that share no
//! code with the library: plain loops, cofactor determinants and direct
//! sums over the atoms.

use num_complex::Complex64;
use twomat::biortho::BiorthoSystem;
use twomat::evaluator::{evaluate, evaluate_all_applicable, evaluate_case, CaseKind, InsertionSpec};
use twomat::kernels::{BiorthoView, KernelContext};
use twomat::measure::{Atom, Measure};
use twomat::oracle::{brute_force_in, detn_in, partition_z, DEFAULT_TERM_BUDGET};
use twomat::sampling::{jittered_circle, reference_measure};
use twomat::wick::{
    cauchy_vev, charge_shift_check, rational_vev_check, two_component_check, vev_det, vev_general, Charges,
    FermionWord, Generator, Kind, LinearCombo, TruncatedField, TwoComponentPoints,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn r(v: f64) -> Complex64 {
    c(v, 0.0)
}

fn rel(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm().max(f64::MIN_POSITIVE)
}

fn naive_bimoment(m: &Measure, j: usize, k: usize) -> Complex64 {
    // Kahan-compensated, powers by repeated multiplication
    let (mut sum, mut comp) = (r(0.0), r(0.0));
    for a in m.atoms() {
        let mut t = a.w;
        for _ in 0..j {
            t *= a.x;
        }
        for _ in 0..k {
            t *= a.y;
        }
        let y = t - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    sum
}

fn cofactor_det(a: &[Vec<Complex64>]) -> Complex64 {
    let n = a.len();
    if n == 0 {
        return r(1.0);
    }
    if n == 1 {
        return a[0][0];
    }
    let mut total = r(0.0);
    for col in 0..n {
        let minor: Vec<Vec<Complex64>> = a[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(j, _)| j != col).map(|(_, v)| *v).collect())
            .collect();
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        total += a[0][col] * sign * cofactor_det(&minor);
    }
    total
}

fn leading_block(m: &Measure, t: usize) -> Vec<Vec<Complex64>> {
    (0..t).map(|j| (0..t).map(|k| naive_bimoment(m, j, k)).collect()).collect()
}

fn with_sys(t: usize) -> (Measure, BiorthoSystem) {
    let m = reference_measure();
    let sys = BiorthoSystem::from_measure(&m, t).unwrap();
    (m, sys)
}

#[test]
fn bimoment_matches_plain_double_loop() {
    let m = reference_measure();
    let got = m.bimoment(3, 4).unwrap();
    assert!(rel(got, naive_bimoment(&m, 3, 4)) <= 1e-14);
}

#[test]
fn leading_minors_are_nonsingular() {
    let m = reference_measure();
    let block = leading_block(&m, 8);
    for t in 1..=8 {
        let sub: Vec<Vec<Complex64>> = block[..t].iter().map(|row| row[..t].to_vec()).collect();
        let d = cofactor_det(&sub);
        let scale: f64 = sub.iter().map(|row| row.iter().map(|v| v.norm()).sum::<f64>()).product();
        assert!(d.norm() > 1e-12 * scale, "minor {t} is {d}");
    }
}

#[test]
fn norms_are_ratios_of_cofactor_minors() {
    let (m, sys) = with_sys(6);
    let block = leading_block(&m, 6);
    let minor = |t: usize| cofactor_det(&block[..t].iter().map(|row| row[..t].to_vec()).collect::<Vec<_>>());
    for n in 0..6 {
        let want = minor(n + 1) / minor(n);
        assert!(rel(sys.h(n as i64).unwrap(), want) <= 1e-10, "h_{n}");
    }
}

#[test]
fn p3_and_s2_are_biorthonormal() {
    let (m, sys) = with_sys(6);
    for k in 0..6i64 {
        let mut p3 = r(0.0);
        let mut s2 = r(0.0);
        for a in m.atoms() {
            p3 += a.w * sys.p(3, a.x).unwrap() * sys.s(k, a.y).unwrap();
            s2 += a.w * sys.p(k, a.x).unwrap() * sys.s(2, a.y).unwrap();
        }
        let d3 = if k == 3 { 1.0 } else { 0.0 };
        let d2 = if k == 2 { 1.0 } else { 0.0 };
        assert!((p3 - d3).norm() <= 1e-10, "P_3 against S_{k}");
        assert!((s2 - d2).norm() <= 1e-10, "P_{k} against S_2");
    }
    // the polynomials are evaluated at the quoted points without error
    assert!(sys.p(3, r(1.7)).unwrap().is_finite());
    assert!(sys.s(2, r(-0.4)).unwrap().is_finite());
}

#[test]
fn hilbert_transforms_match_direct_sums() {
    let (m, sys) = with_sys(6);
    let (mu, eta) = (r(10.0), r(-9.0));
    let mut pt = r(0.0);
    let mut st = r(0.0);
    for a in m.atoms() {
        pt += a.w * sys.p(2, a.x).unwrap() / (mu - a.y);
        st += a.w * sys.s(1, a.y).unwrap() / (eta - a.x);
    }
    assert!(rel(sys.p_tilde(&m, 2, mu, 1e-8).unwrap(), pt) <= 1e-12);
    assert!(rel(sys.s_tilde(&m, 1, eta, 1e-8).unwrap(), st) <= 1e-12);
}

#[test]
fn factorization_residual_at_six() {
    let (m, sys) = with_sys(6);
    let b = m.bimoment_matrix(6).unwrap();
    assert!(sys.factorization_residual(&b) <= 1e-10);
}

#[test]
fn kernels_match_term_by_term_sums() {
    let (m, sys) = with_sys(8);
    let ctx = KernelContext::new(&sys, &m);
    let (xi, zeta, eta, mu) = (r(1.3), r(-0.7), c(3.9, 1.2), c(-2.5, 3.4));
    let pt = |n: i64| m.atoms().iter().map(|a| a.w * sys.p(n, a.x).unwrap() / (mu - a.y)).sum::<Complex64>();
    let st = |n: i64| m.atoms().iter().map(|a| a.w * sys.s(n, a.y).unwrap() / (eta - a.x)).sum::<Complex64>();

    let want: Complex64 = (0..4).map(|n| sys.p(n, xi).unwrap() * sys.s(n, zeta).unwrap()).sum();
    assert!(rel(ctx.kernel_ps(4, xi, zeta).unwrap(), want) <= 1e-12);

    let want: Complex64 = (0..3).map(|n| sys.p(n, xi).unwrap() * st(n)).sum::<Complex64>() + 1.0 / (xi - eta);
    assert!(rel(ctx.kernel_ps_tilde(3, xi, eta).unwrap(), want) <= 1e-12);

    let want: Complex64 = (0..5).map(|n| pt(n) * sys.s(n, zeta).unwrap()).sum::<Complex64>() + 1.0 / (zeta - mu);
    assert!(rel(ctx.kernel_ptilde_s(5, mu, zeta).unwrap(), want) <= 1e-12);

    // two passes: real parts and imaginary parts of the summand separately
    let terms: Vec<Complex64> = m.atoms().iter().map(|a| a.w / ((eta - a.x) * (mu - a.y))).collect();
    let hk = c(terms.iter().map(|t| t.re).sum(), terms.iter().map(|t| t.im).sum());
    assert!(rel(ctx.h_kernel(mu, eta).unwrap(), hk) <= 1e-13);

    let want: Complex64 = (0..2).map(|n| pt(n) * st(n)).sum::<Complex64>() - hk;
    assert!(rel(ctx.kernel_ptilde_stilde(2, mu, eta).unwrap(), want) <= 1e-12);
}

#[test]
fn regime_c2_example_matches_brute_force() {
    let (m, sys) = with_sys(8);
    let ctx = KernelContext::new(&sys, &m);
    let spec = InsertionSpec::new(2)
        .with_zeta(vec![c(3.8, 1.1)])
        .with_eta(vec![c(-4.0, 0.5), c(0.3, 4.2), c(2.9, -3.0)]);
    let report = evaluate(&spec, &ctx).unwrap();
    assert_eq!(report.case.kind, CaseKind::C2);
    let want = brute_force_in(&m, &spec, DEFAULT_TERM_BUDGET).unwrap().value;
    assert!(rel(report.value, want) <= 1e-8, "C2 sign gives {}", report.sign);
}

#[test]
fn full_spec_at_three_matches_brute_force() {
    let (m, sys) = with_sys(8);
    let ctx = KernelContext::new(&sys, &m);
    let spec = InsertionSpec::new(3)
        .with_xi(vec![c(3.7, 1.5)])
        .with_zeta(vec![c(-3.9, 1.0), c(1.2, -4.1)])
        .with_eta(vec![c(0.8, 4.0), c(-3.2, -2.6)])
        .with_mu(vec![c(4.3, -0.4)]);
    let want = brute_force_in(&m, &spec, DEFAULT_TERM_BUDGET).unwrap().value;
    assert!(rel(evaluate(&spec, &ctx).unwrap().value, want) <= 1e-8);
    assert!(rel(detn_in(&m, &spec).unwrap().value, want) <= 1e-9);
}

#[test]
fn overlapping_regimes_agree() {
    let (m, sys) = with_sys(8);
    let ctx = KernelContext::new(&sys, &m);
    let balanced = InsertionSpec::new(3)
        .with_xi(vec![c(3.6, -1.9)])
        .with_zeta(vec![c(-1.4, 3.8)])
        .with_eta(vec![c(-3.5, -2.0)])
        .with_mu(vec![c(2.2, 3.5)]);
    let reports = evaluate_all_applicable(&balanced, &ctx).unwrap();
    let kinds: Vec<CaseKind> = reports.iter().map(|r| r.case.kind).collect();
    assert!(kinds.contains(&CaseKind::C1) && kinds.contains(&CaseKind::C1m));
    for r in &reports {
        assert!(rel(r.value, reports[0].value) <= 1e-8);
    }

    // N1 = N2 = 0 is on every regime boundary
    let boundary = InsertionSpec::new(1)
        .with_eta(vec![c(4.1, 0.3)])
        .with_mu(vec![c(-0.6, 3.9)]);
    let k = boundary.counts();
    assert_eq!((k.n1(), k.n2()), (0, 0));
    let want = detn_in(&m, &boundary).unwrap().value;
    let mut covered = 0;
    for kind in CaseKind::ALL {
        if kind.applies(0, 0) {
            let v = evaluate_case(&boundary, &ctx, kind).unwrap().value;
            assert!(rel(v, want) <= 1e-8, "{}", kind.name());
            covered += 1;
        }
    }
    assert!(covered >= 2);
}

#[test]
fn five_atom_cross_oracle() {
    let m = jittered_circle(5, 11).unwrap();
    let spec = InsertionSpec::new(2).with_mu(vec![r(7.0)]);
    let brute = brute_force_in(&m, &spec, DEFAULT_TERM_BUDGET).unwrap().value;
    let det = detn_in(&m, &spec).unwrap().value;
    assert!(rel(brute, det) <= 1e-10);
}

#[test]
fn two_atom_partition_function() {
    let m = Measure::new("pair", [Atom::new(r(1.0), r(1.0), r(1.0)), Atom::new(r(2.0), r(3.0), r(1.0))]).unwrap();
    let z = partition_z(&m, 2, DEFAULT_TERM_BUDGET).unwrap();
    assert!((z.brute - 4.0).norm() <= 1e-12);
    assert!((z.det_b - 4.0).norm() <= 1e-12);
    assert!((z.norm_product - 4.0).norm() <= 1e-12);

    let z4 = partition_z(&reference_measure(), 4, DEFAULT_TERM_BUDGET).unwrap();
    assert!(z4.max_relative_spread() <= 1e-9);
}

#[test]
fn gauss_legendre_grid_integrates_exp_xy() {
    let m = twomat::io::parse_measure(
        r#"{"grid": {"x_nodes": {"gauss_legendre": {"n": 8}}, "y_nodes": {"gauss_legendre": {"n": 8}}, "weight": "exp_xy"}}"#,
    )
    .unwrap();
    assert_eq!(m.len(), 64);
    // int_{-1}^{1} int_{-1}^{1} e^{xy} = sum over even n of (2/(n+1))^2 / n!
    let mut series = 0.0;
    let mut fact = 1.0;
    for n in 0..40 {
        if n > 0 {
            fact *= n as f64;
        }
        if n % 2 == 0 {
            series += (2.0 / (n as f64 + 1.0)).powi(2) / fact;
        }
    }
    assert!((m.bimoment(0, 0).unwrap().re - series).abs() <= 1e-12);
}

#[test]
fn deformed_measure_wave_function() {
    let m = reference_measure();
    let d = m.deform(&[r(0.0), r(0.1)], &[]).unwrap();
    for (a, b) in m.atoms().iter().zip(d.atoms()) {
        assert!(rel(b.w, a.w * (0.1 * a.x).exp()) <= 1e-15);
    }
    let sys = BiorthoSystem::from_measure(&d, 8).unwrap();
    let ctx = KernelContext::new(&sys, &d);
    for n in 1..=4usize {
        let xi = c(3.8, 1.3);
        let spec = InsertionSpec::new(n).with_xi(vec![xi]);
        let closed = ctx.sqrt_h(n as i64).unwrap() * ctx.p(n as i64, xi).unwrap();
        let brute = brute_force_in(&d, &spec, DEFAULT_TERM_BUDGET).unwrap().value;
        assert!(rel(closed, brute) <= 1e-9, "N = {n}");
        assert!(rel(evaluate(&spec, &ctx).unwrap().value, brute) <= 1e-9);
    }
}

#[test]
fn fermion_two_point_functions() {
    let f = |i| LinearCombo::from_terms(Kind::F, [(i, r(1.0))]);
    let fb = |i| LinearCombo::from_terms(Kind::FBar, [(i, r(1.0))]);
    let vev = |w: Vec<LinearCombo>| vev_general(&FermionWord::vacuum(w), 1_000_000).unwrap();
    assert_eq!(vev(vec![f(-1), fb(-1)]), r(1.0));
    assert_eq!(vev(vec![f(0), fb(0)]), r(0.0));
    assert_eq!(vev(vec![fb(0), f(0)]), r(1.0));
    assert_eq!(vev(vec![f(2), f(3)]), r(0.0));
    let g = Generator::f(-1);
    assert_eq!((g.kind, g.index), (Kind::F, -1));
}

#[test]
fn charged_vacuum_gives_vandermonde() {
    let (x1, x2) = (c(1.5, 0.5), c(-0.7, 2.0));
    let w = 16;
    let one = FermionWord::new(Charges::One(1), vec![TruncatedField::f(x1, w).combo().unwrap()], Charges::One(0));
    assert!((vev_general(&one, 1_000_000).unwrap() - 1.0).norm() <= 1e-15);
    let two = FermionWord::new(
        Charges::One(2),
        vec![TruncatedField::f(x2, w).combo().unwrap(), TruncatedField::f(x1, w).combo().unwrap()],
        Charges::One(0),
    );
    assert!((vev_general(&two, 1_000_000).unwrap() - (x2 - x1)).norm() <= 1e-14);
}

#[test]
fn determinant_form_matches_pairing_on_three_combos() {
    use rand::{Rng, SeedableRng};
    let mut g = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut combo = |kind| {
        LinearCombo::from_terms(kind, (-3..3).map(|i| (i, c(g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0)))))
    };
    let ws: Vec<_> = (0..3).map(|_| combo(Kind::F)).collect();
    let wbars: Vec<_> = (0..3).map(|_| combo(Kind::FBar)).collect();
    let det = vev_det(&ws, &wbars, 0).unwrap();
    // w_1 w_2 w_3 wbar_3 wbar_2 wbar_1
    let mut factors = ws.clone();
    factors.extend(wbars.iter().rev().cloned());
    let pairing = vev_general(&FermionWord::vacuum(factors), 10_000_000).unwrap();
    assert!((det - pairing).norm() <= 1e-12 * (1.0 + det.norm()));

    let parallel = vec![ws[0].clone(), ws[0].scaled(c(2.0, -1.0))];
    // rank one up to rounding in the 2x2 products
    assert!(vev_det(&parallel, &wbars[..2], 0).unwrap().norm() <= 1e-14);
}

#[test]
fn cauchy_series() {
    assert_eq!(cauchy_vev(r(2.0), r(0.0), 60).unwrap(), r(0.5));
    assert!((cauchy_vev(r(2.0), r(1.0), 60).unwrap() - 1.0).norm() <= 1e-15);
    assert!(cauchy_vev(r(2.0), r(3.0), 60).is_err());
}

#[test]
fn rational_vevs() {
    let one = rational_vev_check(&[r(2.0)], &[r(0.5)], 64, 1_000_000).unwrap();
    assert!((one.engine - 1.0 / 1.5).norm() <= 1e-12);
    let chk = rational_vev_check(&[c(2.0, 1.0), c(-1.8, 1.6)], &[c(0.3, -0.2), c(-0.4, 0.1)], 64, 4_000_000).unwrap();
    assert!(chk.residual < 1e-10, "{chk:?}");
}

#[test]
fn two_component_examples() {
    let p = TwoComponentPoints { x1: vec![], y1: vec![], x2: vec![], y2: vec![] };
    let chk = two_component_check(&p, 64, 1_000_000).unwrap();
    assert_eq!(chk.engine, r(1.0));
    assert_eq!(chk.closed_form, r(1.0));

    let p = TwoComponentPoints { x1: vec![r(2.5)], y1: vec![], x2: vec![], y2: vec![r(0.4)] };
    let chk = two_component_check(&p, 64, 1_000_000).unwrap();
    assert!(chk.residual < 1e-10, "{chk:?}");
    assert!(chk.closed_form.re < 0.0, "the sign -1 enters");

    let p = TwoComponentPoints {
        x1: vec![c(2.2, 0.4), c(-1.9, 1.5)],
        y1: vec![c(0.3, 0.2)],
        x2: vec![c(0.5, -2.6)],
        y2: vec![c(-0.4, 0.1), c(0.2, -0.5)],
    };
    let chk = two_component_check(&p, 64, 4_000_000).unwrap();
    assert!(chk.residual < 1e-9, "{chk:?}");
}

#[test]
fn charge_shift_examples() {
    let vacuum = FermionWord::new(Charges::Two(0, 0), vec![], Charges::Two(0, 0));
    assert_eq!(charge_shift_check(&vacuum, 1, 64, 1_000_000).unwrap(), 0.0);

    let f2 = LinearCombo::from_terms(Kind::F, [(Generator::two_component(Kind::F, 2, -1).index, r(1.0))]);
    let word = FermionWord::new(Charges::Two(1, -1), vec![f2], Charges::Two(1, 0));
    assert_eq!(charge_shift_check(&word, 2, 64, 1_000_000).unwrap(), 0.0);

    let small = FermionWord::new(
        Charges::Two(0, 1),
        vec![
            LinearCombo::from_terms(Kind::F, [(Generator::two_component(Kind::F, 2, 0).index, c(0.5, 1.0))]),
            LinearCombo::from_terms(Kind::F, [(Generator::two_component(Kind::F, 1, 0).index, r(2.0))]),
            LinearCombo::from_terms(Kind::FBar, [(Generator::two_component(Kind::FBar, 1, 0).index, r(-1.0))]),
        ],
        Charges::Two(0, 0),
    );
    assert_eq!(charge_shift_check(&small, -1, 64, 1_000_000).unwrap(), 0.0);
}
