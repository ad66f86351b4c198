//! Fixed-size determinant formulas for
//!
//! ```text
//! I_N = (1/Z_N) int prod_a dmu(x_a, y_a) Delta(x) Delta(y)
//!       prod_a prod(xi - x_a) prod(zeta - y_a) / (prod(eta - x_a) prod(mu - y_a))
//! ```
//!
//! With `N1 = N + L1 - M1` and `N2 = N + L2 - M2` the value is
//! `sign * prefactor * det G`, where `G` has a size independent of `N`
//! and its block layout depends on which of six sign/ordering regimes
//! `(N1, N2)` falls in. The mirrored regimes are the direct ones applied
//! to the transposed measure with the families swapped
//! (`xi <-> zeta`, `eta <-> mu`).

use crate::biortho::check_pole;
use crate::error::{Error, Result};
use crate::kernels::{BiorthoView, KernelContext, Mirrored};
use crate::linalg::{c, condition_estimate, det, vandermonde, CMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Condition number of `G` above which a value is flagged low-confidence.
pub const CONDITION_GUARD: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct InsertionSpec {
    pub n: usize,
    pub xi: Vec<Complex64>,
    pub zeta: Vec<Complex64>,
    pub eta: Vec<Complex64>,
    pub mu: Vec<Complex64>,
}

/// Family sizes and the derived case indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Counts {
    pub n: i64,
    pub l1: i64,
    pub l2: i64,
    pub m1: i64,
    pub m2: i64,
}

impl Counts {
    pub fn n1(&self) -> i64 {
        self.n + self.l1 - self.m1
    }

    pub fn n2(&self) -> i64 {
        self.n + self.l2 - self.m2
    }

    pub fn swapped(&self) -> Counts {
        Counts {
            n: self.n,
            l1: self.l2,
            l2: self.l1,
            m1: self.m2,
            m2: self.m1,
        }
    }
}

impl InsertionSpec {
    pub fn new(n: usize) -> Self {
        InsertionSpec {
            n,
            xi: vec![],
            zeta: vec![],
            eta: vec![],
            mu: vec![],
        }
    }

    pub fn with_xi(mut self, v: Vec<Complex64>) -> Self {
        self.xi = v;
        self
    }

    pub fn with_zeta(mut self, v: Vec<Complex64>) -> Self {
        self.zeta = v;
        self
    }

    pub fn with_eta(mut self, v: Vec<Complex64>) -> Self {
        self.eta = v;
        self
    }

    pub fn with_mu(mut self, v: Vec<Complex64>) -> Self {
        self.mu = v;
        self
    }

    pub fn counts(&self) -> Counts {
        Counts {
            n: self.n as i64,
            l1: self.xi.len() as i64,
            l2: self.zeta.len() as i64,
            m1: self.eta.len() as i64,
            m2: self.mu.len() as i64,
        }
    }

    /// Families exchanged as under `x <-> y`.
    pub fn mirrored(&self) -> InsertionSpec {
        InsertionSpec {
            n: self.n,
            xi: self.zeta.clone(),
            zeta: self.xi.clone(),
            eta: self.mu.clone(),
            mu: self.eta.clone(),
        }
    }

    /// `N >= 1` and points pairwise separated by more than `eps` inside
    /// each family.
    pub fn validate(&self, eps: f64) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Invalid("N must be at least 1".into()));
        }
        for (name, fam) in [
            ("xi", &self.xi),
            ("zeta", &self.zeta),
            ("eta", &self.eta),
            ("mu", &self.mu),
        ] {
            for (i, a) in fam.iter().enumerate() {
                if !(a.re.is_finite() && a.im.is_finite()) {
                    return Err(Error::NonFinite(format!("{name}[{i}]")));
                }
                for b in &fam[..i] {
                    if (a - b).norm() <= eps {
                        return Err(Error::Degenerate(format!(
                            "coincident points {b} and {a} in family {name}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Drops `(xi, eta)` and `(zeta, mu)` pairs with identical values;
    /// their factors cancel in the integrand. Returns the reduced spec and
    /// the number of pairs removed.
    pub fn cancel_coincident(&self) -> (InsertionSpec, usize) {
        fn cancel(zeros: &[Complex64], poles: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>, usize) {
            let mut poles: Vec<Option<Complex64>> = poles.iter().copied().map(Some).collect();
            let mut kept = Vec::new();
            let mut removed = 0;
            for &z in zeros {
                if let Some(slot) = poles.iter_mut().find(|p| **p == Some(z)) {
                    *slot = None;
                    removed += 1;
                } else {
                    kept.push(z);
                }
            }
            (kept, poles.into_iter().flatten().collect(), removed)
        }
        let (xi, eta, r1) = cancel(&self.xi, &self.eta);
        let (zeta, mu, r2) = cancel(&self.zeta, &self.mu);
        (
            InsertionSpec {
                n: self.n,
                xi,
                zeta,
                eta,
                mu,
            },
            r1 + r2,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseKind {
    /// `N2 >= N1 >= 0`
    C1,
    /// `N1 >= N2 >= 0`
    C1m,
    /// `N1 <= 0 <= N2`
    C2,
    /// `N2 <= 0 <= N1`
    C2m,
    /// `N1 <= N2 <= 0`
    C3,
    /// `N2 <= N1 <= 0`
    C3m,
}

impl CaseKind {
    pub const ALL: [CaseKind; 6] = [
        CaseKind::C1,
        CaseKind::C1m,
        CaseKind::C2,
        CaseKind::C2m,
        CaseKind::C3,
        CaseKind::C3m,
    ];

    pub fn applies(self, n1: i64, n2: i64) -> bool {
        match self {
            CaseKind::C1 => n2 >= n1 && n1 >= 0,
            CaseKind::C1m => n1 >= n2 && n2 >= 0,
            CaseKind::C2 => n1 <= 0 && 0 <= n2,
            CaseKind::C2m => n2 <= 0 && 0 <= n1,
            CaseKind::C3 => n1 <= n2 && n2 <= 0,
            CaseKind::C3m => n2 <= n1 && n1 <= 0,
        }
    }

    pub fn is_mirror(self) -> bool {
        matches!(self, CaseKind::C1m | CaseKind::C2m | CaseKind::C3m)
    }

    /// The direct case a mirrored one reduces to.
    pub fn direct(self) -> CaseKind {
        match self {
            CaseKind::C1 | CaseKind::C1m => CaseKind::C1,
            CaseKind::C2 | CaseKind::C2m => CaseKind::C2,
            CaseKind::C3 | CaseKind::C3m => CaseKind::C3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CaseKind::C1 => "C1",
            CaseKind::C1m => "C1m",
            CaseKind::C2 => "C2",
            CaseKind::C2m => "C2m",
            CaseKind::C3 => "C3",
            CaseKind::C3m => "C3m",
        }
    }

    /// Size of `G` for these counts.
    pub fn dimension(self, k: &Counts) -> i64 {
        match self {
            CaseKind::C1 | CaseKind::C2 => k.l2 + k.m1,
            CaseKind::C1m | CaseKind::C2m => k.l1 + k.m2,
            CaseKind::C3 | CaseKind::C3m => k.m1 + k.m2 - k.n,
        }
    }
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseTag {
    pub kind: CaseKind,
    pub n1: i64,
    pub n2: i64,
}

/// All regimes containing `(N1, N2)`, in priority order.
pub fn applicable_cases(spec: &InsertionSpec) -> Vec<CaseTag> {
    let k = spec.counts();
    let (n1, n2) = (k.n1(), k.n2());
    CaseKind::ALL
        .iter()
        .filter(|kind| kind.applies(n1, n2))
        .map(|&kind| CaseTag { kind, n1, n2 })
        .collect()
}

/// The canonical regime (first applicable in the order C1, C1m, C2, C2m,
/// C3, C3m). The six regimes cover the plane, so one always applies.
pub fn classify(spec: &InsertionSpec) -> CaseTag {
    let tags = applicable_cases(spec);
    assert!(!tags.is_empty(), "case regimes cover every (N1, N2)");
    tags[0]
}

fn pairs(n: i64) -> i64 {
    n * (n - 1) / 2
}

/// Sign of the formula for the block layouts produced by [`build_g`].
/// Each exponent is the parity of the row/column permutation that takes
/// the pairwise-contraction matrix to the layout, checked against the
/// N-fold sum over the whole small-count range.
pub fn case_sign(kind: CaseKind, k: &Counts) -> f64 {
    if kind.is_mirror() {
        return case_sign(kind.direct(), &k.swapped());
    }
    let Counts { n, l1, l2, m1, m2 } = *k;
    let e = match kind {
        CaseKind::C1 => pairs(m1 + m2) + l2 * m1,
        CaseKind::C2 => {
            l1 + m2 + pairs(n) + pairs(l1) + pairs(m2) + n * l2 + n * m2 + l1 * l2 + l1 * m1 + l1 * m2
        }
        CaseKind::C3 => {
            n + l1 + pairs(l1) + pairs(l2) + n * (l1 + l2 + m1 + m2) + l1 * m1 + l1 * m2 + l2 * m2 + m1 * m2
        }
        _ => unreachable!(),
    };
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `prod_{n=lo}^{hi} sqrt(h_n)`, where a reversed range `hi < lo - 1`
/// means the reciprocal `1 / prod_{n=hi+1}^{lo-1} sqrt(h_n)` and
/// `hi = lo - 1` is empty. Negative indices contribute `sqrt(h_n) = 1`.
pub fn root_product<V: BiorthoView + ?Sized>(view: &V, lo: i64, hi: i64) -> Result<Complex64> {
    if hi >= lo {
        (lo..=hi).try_fold(c(1.0), |acc, n| Ok(acc * view.sqrt_h(n)?))
    } else {
        let inv = (hi + 1..lo).try_fold(c(1.0), |acc, n| Ok::<_, Error>(acc * view.sqrt_h(n)?))?;
        Ok(c(1.0) / inv)
    }
}

/// `prod(xi - eta) prod(zeta - mu) / (Delta(xi) Delta(zeta) Delta(eta) Delta(mu))`.
pub fn cross_ratio(spec: &InsertionSpec) -> Result<Complex64> {
    let mut num = c(1.0);
    for a in &spec.xi {
        for b in &spec.eta {
            num *= a - b;
        }
    }
    for a in &spec.zeta {
        for b in &spec.mu {
            num *= a - b;
        }
    }
    let den = vandermonde(&spec.xi)
        * vandermonde(&spec.zeta)
        * vandermonde(&spec.eta)
        * vandermonde(&spec.mu);
    if den == c(0.0) || !den.norm().is_normal() {
        return Err(Error::Degenerate(
            "Vandermonde of an insertion family vanished or underflowed".into(),
        ));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prefactor {
    pub sign: f64,
    pub scale: Complex64,
}

impl Prefactor {
    pub fn signed(&self) -> Complex64 {
        self.scale * self.sign
    }
}

/// Sign, root-norm products and cross ratio multiplying `det G`.
pub fn signed_prefactor<V: BiorthoView>(spec: &InsertionSpec, view: &V, kind: CaseKind) -> Result<Prefactor> {
    let k = spec.counts();
    let roots = root_product(view, k.n, k.n1() - 1)? * root_product(view, k.n, k.n2() - 1)?;
    Ok(Prefactor {
        sign: case_sign(kind, &k),
        scale: roots * cross_ratio(spec)?,
    })
}

fn require_applicable(spec: &InsertionSpec, kind: CaseKind) -> Result<Counts> {
    let k = spec.counts();
    if !kind.applies(k.n1(), k.n2()) {
        return Err(Error::Invalid(format!(
            "case {kind} does not apply to N1 = {}, N2 = {}",
            k.n1(),
            k.n2()
        )));
    }
    Ok(k)
}

fn inverse_gap(a: Complex64, b: Complex64, eps: f64) -> Result<Complex64> {
    check_pole(a, b, eps, "the pole")?;
    Ok(c(1.0) / (a - b))
}

/// `N2 >= N1 >= 0`. Rows: `zeta` then `eta`. Columns: `mu`, `xi`, then
/// the polynomial orders `n = N1 .. N2-1`.
fn g_case1<V: BiorthoView>(spec: &InsertionSpec, v: &V) -> Result<CMatrix> {
    let k = spec.counts();
    let (n1, n2) = (k.n1(), k.n2());
    let j = n1 as usize;
    let dim = (k.l2 + k.m1) as usize;
    let mut g = CMatrix::zeros(dim, dim);
    for (r, &z) in spec.zeta.iter().enumerate() {
        let mut col = 0;
        for &m in &spec.mu {
            g[(r, col)] = v.kernel_ptilde_s(j, m, z)?;
            col += 1;
        }
        for &x in &spec.xi {
            g[(r, col)] = v.kernel_ps(j, x, z)?;
            col += 1;
        }
        for n in n1..n2 {
            g[(r, col)] = v.s(n, z)?;
            col += 1;
        }
    }
    for (i, &e) in spec.eta.iter().enumerate() {
        let r = spec.zeta.len() + i;
        let mut col = 0;
        for &m in &spec.mu {
            g[(r, col)] = v.kernel_ptilde_stilde(j, m, e)?;
            col += 1;
        }
        for &x in &spec.xi {
            g[(r, col)] = v.kernel_ps_tilde(j, x, e)?;
            col += 1;
        }
        for n in n1..n2 {
            g[(r, col)] = v.s_tilde(n, e)?;
            col += 1;
        }
    }
    Ok(g)
}

/// `N1 <= 0 <= N2`. Rows: `zeta` then `eta`. Columns: `mu`, `xi`, the
/// orders `n = 0 .. N2-1`, then the powers `eta^p`, `p = 0 .. -N1-1`.
fn g_case2<V: BiorthoView>(spec: &InsertionSpec, v: &V) -> Result<CMatrix> {
    let k = spec.counts();
    let (n1, n2) = (k.n1(), k.n2());
    let eps = v.eps_pole();
    let dim = (k.l2 + k.m1) as usize;
    let (off_xi, off_n) = (spec.mu.len(), spec.mu.len() + spec.xi.len());
    let off_pow = off_n + n2 as usize;
    let mut g = CMatrix::zeros(dim, dim);
    for (r, &z) in spec.zeta.iter().enumerate() {
        for (col, &m) in spec.mu.iter().enumerate() {
            g[(r, col)] = inverse_gap(m, z, eps)?;
        }
        for n in 0..n2 {
            g[(r, off_n + n as usize)] = v.s(n, z)?;
        }
    }
    for (i, &e) in spec.eta.iter().enumerate() {
        let r = spec.zeta.len() + i;
        for (col, &m) in spec.mu.iter().enumerate() {
            g[(r, col)] = v.h_kernel(m, e)?;
        }
        for (a, &x) in spec.xi.iter().enumerate() {
            g[(r, off_xi + a)] = inverse_gap(x, e, eps)?;
        }
        for n in 0..n2 {
            g[(r, off_n + n as usize)] = v.s_tilde(n, e)?;
        }
        for p in 0..(-n1) {
            g[(r, off_pow + p as usize)] = e.powi(p as i32);
        }
    }
    Ok(g)
}

/// `N1 <= N2 <= 0`. Rows: `xi`, `mu`, then powers `p = 0 .. -N1-1`.
/// Columns: `eta`, `zeta`, then powers `q = 0 .. -N2-1`.
fn g_case3<V: BiorthoView>(spec: &InsertionSpec, v: &V) -> Result<CMatrix> {
    let k = spec.counts();
    let (n1, n2) = (k.n1(), k.n2());
    let eps = v.eps_pole();
    let dim = (k.m1 + k.m2 - k.n) as usize;
    let off_zeta = spec.eta.len();
    let off_q = off_zeta + spec.zeta.len();
    let mut g = CMatrix::zeros(dim, dim);
    for (r, &x) in spec.xi.iter().enumerate() {
        for (col, &e) in spec.eta.iter().enumerate() {
            g[(r, col)] = inverse_gap(x, e, eps)?;
        }
    }
    for (i, &m) in spec.mu.iter().enumerate() {
        let r = spec.xi.len() + i;
        for (col, &e) in spec.eta.iter().enumerate() {
            g[(r, col)] = v.h_kernel(m, e)?;
        }
        for (b, &z) in spec.zeta.iter().enumerate() {
            g[(r, off_zeta + b)] = inverse_gap(m, z, eps)?;
        }
        for q in 0..(-n2) {
            g[(r, off_q + q as usize)] = m.powi(q as i32);
        }
    }
    for p in 0..(-n1) {
        let r = spec.xi.len() + spec.mu.len() + p as usize;
        for (col, &e) in spec.eta.iter().enumerate() {
            g[(r, col)] = e.powi(p as i32);
        }
    }
    Ok(g)
}

fn g_direct<V: BiorthoView>(spec: &InsertionSpec, v: &V, kind: CaseKind) -> Result<CMatrix> {
    match kind {
        CaseKind::C1 => g_case1(spec, v),
        CaseKind::C2 => g_case2(spec, v),
        CaseKind::C3 => g_case3(spec, v),
        _ => unreachable!(),
    }
}

/// The block matrix `G` for `kind`. Mirrored kinds are built as the
/// direct layout on the mirrored spec seen through [`Mirrored`].
pub fn build_g<V: BiorthoView + Copy>(spec: &InsertionSpec, view: &V, kind: CaseKind) -> Result<CMatrix> {
    let k = require_applicable(spec, kind)?;
    let needed = k.n.max(k.n1()).max(k.n2());
    if needed > view.truncation() as i64 {
        return Err(Error::Truncation {
            index: needed - 1,
            trunc: view.truncation(),
        });
    }
    if kind.is_mirror() {
        g_direct(&spec.mirrored(), &Mirrored(*view), kind.direct())
    } else {
        g_direct(spec, view, kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// `sign * prefactor * det_g`
    pub value: Complex64,
    pub case: CaseTag,
    pub applicable: Vec<CaseKind>,
    pub g: CMatrix,
    pub det_g: Complex64,
    pub prefactor: Complex64,
    pub sign: f64,
    pub condition: f64,
    pub low_confidence: bool,
    /// `(xi, eta)` / `(zeta, mu)` pairs removed before evaluation.
    pub cancelled_pairs: usize,
    pub diagnostics: BTreeMap<String, f64>,
}

/// Evaluates one specific regime; errors if it does not apply.
pub fn evaluate_case(spec: &InsertionSpec, ctx: &KernelContext<'_>, kind: CaseKind) -> Result<EvalReport> {
    spec.validate(ctx.eps_pole)?;
    let (reduced, cancelled) = spec.cancel_coincident();
    let k = require_applicable(&reduced, kind)?;
    let g = build_g(&reduced, ctx, kind)?;
    let pre = signed_prefactor(&reduced, ctx, kind)?;
    let det_g = det(&g);
    let condition = condition_estimate(&g);
    let value = pre.scale * pre.sign * det_g;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::NonFinite(format!("I_N in case {kind}")));
    }
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("condition_g".to_string(), condition);
    diagnostics.insert("dimension_g".to_string(), g.nrows() as f64);
    diagnostics.insert("cancelled_pairs".to_string(), cancelled as f64);
    Ok(EvalReport {
        value,
        case: CaseTag {
            kind,
            n1: k.n1(),
            n2: k.n2(),
        },
        applicable: applicable_cases(&reduced).into_iter().map(|t| t.kind).collect(),
        g,
        det_g,
        prefactor: pre.scale,
        sign: pre.sign,
        condition,
        low_confidence: condition > CONDITION_GUARD,
        cancelled_pairs: cancelled,
        diagnostics,
    })
}

/// `I_N` through the canonical regime.
pub fn evaluate(spec: &InsertionSpec, ctx: &KernelContext<'_>) -> Result<EvalReport> {
    spec.validate(ctx.eps_pole)?;
    let (reduced, _) = spec.cancel_coincident();
    evaluate_case(spec, ctx, classify(&reduced).kind)
}

/// One report per applicable regime.
pub fn evaluate_all_applicable(spec: &InsertionSpec, ctx: &KernelContext<'_>) -> Result<Vec<EvalReport>> {
    spec.validate(ctx.eps_pole)?;
    let (reduced, _) = spec.cancel_coincident();
    applicable_cases(&reduced)
        .into_iter()
        .map(|t| evaluate_case(spec, ctx, t.kind))
        .collect()
}

/// Largest pairwise relative spread among values, used for overlap checks.
pub fn max_relative_spread(values: &[Complex64]) -> f64 {
    let mut worst = 0.0_f64;
    for (i, a) in values.iter().enumerate() {
        for b in &values[..i] {
            let scale = a.norm().max(b.norm()).max(f64::MIN_POSITIVE);
            worst = worst.max((a - b).norm() / scale);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biortho::BiorthoSystem;
    use crate::measure::{Atom, Measure};

    fn spec(n: usize, l1: usize, l2: usize, m1: usize, m2: usize) -> InsertionSpec {
        let pts = |k: usize, base: f64| (0..k).map(|i| c(base + i as f64)).collect::<Vec<_>>();
        InsertionSpec::new(n)
            .with_xi(pts(l1, 10.0))
            .with_zeta(pts(l2, 20.0))
            .with_eta(pts(m1, 30.0))
            .with_mu(pts(m2, 40.0))
    }

    #[test]
    fn classification_examples() {
        let t = classify(&spec(3, 0, 0, 1, 0));
        assert_eq!((t.kind, t.n1, t.n2), (CaseKind::C1, 2, 3));
        let t = classify(&spec(2, 0, 0, 3, 0));
        assert_eq!((t.kind, t.n1, t.n2), (CaseKind::C2, -1, 2));
        let t = classify(&spec(1, 0, 0, 3, 2));
        assert_eq!((t.kind, t.n1, t.n2), (CaseKind::C3, -2, -1));
        let t = classify(&spec(2, 1, 0, 0, 0));
        assert_eq!(t.kind, CaseKind::C1m);
    }

    #[test]
    fn boundary_regimes_overlap() {
        let kinds: Vec<_> = applicable_cases(&spec(2, 0, 0, 0, 0)).iter().map(|t| t.kind).collect();
        assert_eq!(kinds, vec![CaseKind::C1, CaseKind::C1m]);
        let kinds: Vec<_> = applicable_cases(&spec(1, 0, 0, 1, 1)).iter().map(|t| t.kind).collect();
        assert_eq!(kinds, CaseKind::ALL.to_vec());
    }

    #[test]
    fn regimes_cover_the_plane() {
        for n1 in -6..=6 {
            for n2 in -6..=6 {
                assert!(CaseKind::ALL.iter().any(|k| k.applies(n1, n2)));
            }
        }
    }

    #[test]
    fn root_product_conventions() {
        let m = Measure::new(
            "m",
            [
                Atom::new(c(1.0), c(1.0), c(4.0)),
                Atom::new(c(2.0), c(3.0), c(1.0)),
            ],
        )
        .unwrap();
        let sys = BiorthoSystem::from_measure(&m, 2).unwrap();
        let ctx = KernelContext::new(&sys, &m);
        assert_eq!(root_product(&ctx, 1, 0).unwrap(), c(1.0));
        assert_eq!(root_product(&ctx, 1, 1).unwrap(), sys.sqrt_h(1).unwrap());
        let r = root_product(&ctx, 2, -1).unwrap();
        assert!((r - c(1.0) / (sys.sqrt_h(0).unwrap() * sys.sqrt_h(1).unwrap())).norm() < 1e-15);
        // negative orders count as one
        assert_eq!(root_product(&ctx, 0, -3).unwrap(), c(1.0));
    }

    #[test]
    fn mirrored_sign_swaps_counts() {
        let k = Counts {
            n: 2,
            l1: 0,
            l2: 1,
            m1: 3,
            m2: 0,
        };
        assert_eq!(case_sign(CaseKind::C2m, &k.swapped()), case_sign(CaseKind::C2, &k));
    }

    #[test]
    fn coincident_pairs_cancel() {
        let v = c(7.0);
        let s = InsertionSpec::new(2).with_xi(vec![v, c(1.0)]).with_eta(vec![c(2.0), v]);
        let (r, k) = s.cancel_coincident();
        assert_eq!(k, 1);
        assert_eq!(r.xi, vec![c(1.0)]);
        assert_eq!(r.eta, vec![c(2.0)]);
    }

    #[test]
    fn validation() {
        assert!(InsertionSpec::new(0).validate(1e-8).is_err());
        let s = InsertionSpec::new(1).with_xi(vec![c(1.0), c(1.0)]);
        assert!(matches!(s.validate(1e-8), Err(Error::Degenerate(_))));
    }

    #[test]
    fn dimensions() {
        let k = spec(1, 0, 0, 3, 2).counts();
        assert_eq!(CaseKind::C3.dimension(&k), 4);
        let k = spec(3, 1, 2, 2, 1).counts();
        assert_eq!(CaseKind::C1.dimension(&k), 4);
        assert_eq!(CaseKind::C1m.dimension(&k), 2);
    }
}
