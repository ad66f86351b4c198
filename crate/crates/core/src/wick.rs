//! A finite free-fermion engine.
//!
//! Generators `f_m`, `fbar_m` satisfy `[f_m, fbar_n]_+ = delta_{mn}` and
//! annihilate the vacuum as `f_m|0> = 0` for `m < 0`, `fbar_m|0> = 0` for
//! `m >= 0`. Charged vacua are rewritten as explicit generator strings
//! acting on `<0|` and `|0>`, after which a vacuum expectation is a signed
//! sum over perfect pairings of two-point functions.

use crate::error::{Error, Result};
use crate::linalg::{c, det, vandermonde, CMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Modes per sign kept in truncated fields.
pub const DEFAULT_WINDOW: i64 = 64;

/// Largest word accepted by [`vev_general`], excluding vacuum strings.
pub const MAX_FACTORS: usize = 16;

/// Default cap on distinct sub-words visited by the pairing recursion.
pub const DEFAULT_STATE_BUDGET: u64 = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    F,
    FBar,
}

/// A single `f_index` or `fbar_index` in the one-component labelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Generator {
    pub kind: Kind,
    pub index: i64,
}

impl Generator {
    pub fn new(kind: Kind, index: i64, window: i64) -> Result<Self> {
        if index < -window || index >= window {
            return Err(Error::Invalid(format!("mode {index} outside window [-{window}, {window})")));
        }
        Ok(Generator { kind, index })
    }

    pub fn f(index: i64) -> Self {
        Generator { kind: Kind::F, index }
    }

    pub fn fbar(index: i64) -> Self {
        Generator { kind: Kind::FBar, index }
    }

    /// `f^{(alpha)}_n = f_{2n + alpha - 1}` for `alpha` in `{1, 2}`.
    pub fn two_component(kind: Kind, alpha: u8, n: i64) -> Self {
        debug_assert!(alpha == 1 || alpha == 2);
        Generator {
            kind,
            index: 2 * n + alpha as i64 - 1,
        }
    }
}

/// `sum_m c_m f_m` or `sum_m c_m fbar_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCombo {
    kind: Kind,
    coeffs: BTreeMap<i64, Complex64>,
}

impl LinearCombo {
    pub fn new(kind: Kind) -> Self {
        LinearCombo {
            kind,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms(kind: Kind, terms: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut out = LinearCombo::new(kind);
        for (i, v) in terms {
            out.add_term(i, v);
        }
        out
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Complex64> {
        &self.coeffs
    }

    pub fn add_term(&mut self, index: i64, coeff: Complex64) {
        if coeff == c(0.0) {
            return;
        }
        let slot = self.coeffs.entry(index).or_insert(c(0.0));
        *slot += coeff;
        if *slot == c(0.0) {
            self.coeffs.remove(&index);
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        LinearCombo::from_terms(self.kind, self.coeffs.iter().map(|(&i, &v)| (i, v * s)))
    }

    /// Renames every mode through `map`.
    pub fn relabeled(&self, map: impl Fn(i64) -> i64) -> Self {
        LinearCombo::from_terms(self.kind, self.coeffs.iter().map(|(&i, &v)| (map(i), v)))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_abs_index(&self) -> i64 {
        self.coeffs.keys().map(|i| if *i < 0 { -i - 1 } else { *i }).max().unwrap_or(0)
    }
}

impl From<Generator> for LinearCombo {
    fn from(g: Generator) -> Self {
        LinearCombo::from_terms(g.kind, [(g.index, c(1.0))])
    }
}

/// `<c| a b |c>` for the one-component vacuum of charge `cutoff`.
pub fn pair_vev(a: &LinearCombo, b: &LinearCombo, cutoff: i64) -> Complex64 {
    let keep: fn(i64, i64) -> bool = match (a.kind, b.kind) {
        (Kind::F, Kind::FBar) => |m, cut| m < cut,
        (Kind::FBar, Kind::F) => |m, cut| m >= cut,
        _ => return c(0.0),
    };
    let (small, large) = if a.coeffs.len() <= b.coeffs.len() { (a, b) } else { (b, a) };
    let mut acc = c(0.0);
    for (&m, &u) in &small.coeffs {
        if keep(m, cutoff) {
            if let Some(&v) = large.coeffs.get(&m) {
                acc += u * v;
            }
        }
    }
    acc
}

/// Vacuum charges of a word: one integer, or one per component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Charges {
    One(i64),
    Two(i64, i64),
}

impl Charges {
    fn magnitude(self) -> i64 {
        match self {
            Charges::One(n) => n.abs(),
            Charges::Two(a, b) => a.abs().max(b.abs()),
        }
    }
}

/// Generators of `C_N`, the left charge-`N` string in some labelling.
fn left_string(n: i64, label: impl Fn(Kind, i64) -> Generator) -> Vec<Generator> {
    if n > 0 {
        (0..n).map(|k| label(Kind::FBar, k)).collect()
    } else {
        (n..0).rev().map(|k| label(Kind::F, k)).collect()
    }
}

/// Generators of `Cbar_N`, the right charge-`N` string.
fn right_string(n: i64, label: impl Fn(Kind, i64) -> Generator) -> Vec<Generator> {
    if n > 0 {
        (0..n).rev().map(|k| label(Kind::F, k)).collect()
    } else {
        (n..0).map(|k| label(Kind::FBar, k)).collect()
    }
}

/// `<left| factors |right>` with charged vacua.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionWord {
    pub left: Charges,
    pub factors: Vec<LinearCombo>,
    pub right: Charges,
}

impl FermionWord {
    pub fn new(left: Charges, factors: Vec<LinearCombo>, right: Charges) -> Self {
        FermionWord { left, factors, right }
    }

    /// `<0| factors |0>`.
    pub fn vacuum(factors: Vec<LinearCombo>) -> Self {
        FermionWord::new(Charges::One(0), factors, Charges::One(0))
    }

    /// The operator string between `<0|` and `|0>` with both vacua
    /// written out as generators.
    pub fn expand(&self) -> Vec<LinearCombo> {
        let mut ops: Vec<LinearCombo> = Vec::new();
        let one = |k, i| Generator { kind: k, index: i };
        match self.left {
            Charges::One(n) => ops.extend(left_string(n, one).into_iter().map(Into::into)),
            Charges::Two(n1, n2) => {
                for (alpha, n) in [(1u8, n1), (2u8, n2)] {
                    let gens = left_string(n, |k, i| Generator::two_component(k, alpha, i));
                    ops.extend(gens.into_iter().map(Into::into));
                }
            }
        }
        ops.extend(self.factors.iter().cloned());
        match self.right {
            Charges::One(n) => ops.extend(right_string(n, one).into_iter().map(Into::into)),
            Charges::Two(n1, n2) => {
                for (alpha, n) in [(2u8, n2), (1u8, n1)] {
                    let gens = right_string(n, |k, i| Generator::two_component(k, alpha, i));
                    ops.extend(gens.into_iter().map(Into::into));
                }
            }
        }
        ops
    }

    /// Shifts the second-component charges by `n` and renames every
    /// second-component mode `k -> k + n`.
    pub fn shift_second_component(&self, n: i64) -> Result<FermionWord> {
        let shift = |ch: Charges| match ch {
            Charges::Two(a, b) => Ok(Charges::Two(a, b + n)),
            Charges::One(_) => Err(Error::Invalid("charge shift needs a two-component word".into())),
        };
        let relabel = |i: i64| if i.rem_euclid(2) == 1 { i + 2 * n } else { i };
        Ok(FermionWord {
            left: shift(self.left)?,
            factors: self.factors.iter().map(|f| f.relabeled(relabel)).collect(),
            right: shift(self.right)?,
        })
    }

    fn check_window(&self, window: i64) -> Result<()> {
        let needed = self.left.magnitude().max(self.right.magnitude());
        if needed > window {
            return Err(Error::Invalid(format!("window {window} too small for charge {needed}")));
        }
        Ok(())
    }
}

/// Wick expansion as a signed sum over perfect pairings.
///
/// The recursion pairs the leftmost operator with each later one and
/// caches sub-words by their remaining-operator mask. `state_budget`
/// bounds the number of cached sub-words.
pub fn vev_general(word: &FermionWord, state_budget: u64) -> Result<Complex64> {
    if word.factors.len() > MAX_FACTORS {
        return Err(Error::Budget(format!(
            "{} factors exceed the pairing limit of {MAX_FACTORS}",
            word.factors.len()
        )));
    }
    vev_of_string(&word.expand(), state_budget)
}

fn vev_of_string(ops: &[LinearCombo], state_budget: u64) -> Result<Complex64> {
    let n = ops.len();
    if n % 2 == 1 {
        return Ok(c(0.0));
    }
    let f_count = ops.iter().filter(|o| o.kind == Kind::F).count();
    if 2 * f_count != n {
        return Ok(c(0.0));
    }
    if n > 64 {
        return Err(Error::Budget(format!("{n} operators after vacuum expansion exceed 64")));
    }
    let mut contraction = vec![vec![c(0.0); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            contraction[i][j] = pair_vev(&ops[i], &ops[j], 0);
        }
    }
    let mut memo = HashMap::new();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    pairings(full, &contraction, &mut memo, state_budget)
}

fn pairings(
    mask: u64,
    contraction: &[Vec<Complex64>],
    memo: &mut HashMap<u64, Complex64>,
    budget: u64,
) -> Result<Complex64> {
    if mask == 0 {
        return Ok(c(1.0));
    }
    if let Some(&v) = memo.get(&mask) {
        return Ok(v);
    }
    if memo.len() as u64 >= budget {
        return Err(Error::Budget(format!("pairing recursion exceeded {budget} states")));
    }
    let first = mask.trailing_zeros() as usize;
    let rest = mask & !(1u64 << first);
    let mut acc = c(0.0);
    let mut sign = 1.0;
    let mut scan = rest;
    while scan != 0 {
        let j = scan.trailing_zeros() as usize;
        scan &= scan - 1;
        let pair = contraction[first][j];
        if pair != c(0.0) {
            acc += pair * sign * pairings(rest & !(1u64 << j), contraction, memo, budget)?;
        }
        sign = -sign;
    }
    memo.insert(mask, acc);
    Ok(acc)
}

/// `<c| w_1 ... w_N wbar_N ... wbar_1 |c> = det <c| w_i wbar_j |c>`.
/// `wbars` is given as `[wbar_1, ..., wbar_N]`.
pub fn vev_det(ws: &[LinearCombo], wbars: &[LinearCombo], charge: i64) -> Result<Complex64> {
    if ws.len() != wbars.len() {
        return Err(Error::Invalid(format!(
            "{} f-type and {} fbar-type factors",
            ws.len(),
            wbars.len()
        )));
    }
    if ws.iter().any(|w| w.kind != Kind::F) || wbars.iter().any(|w| w.kind != Kind::FBar) {
        return Err(Error::Invalid("vev_det expects f-type then fbar-type combos".into()));
    }
    let n = ws.len();
    let m = CMatrix::from_fn(n, n, |i, j| pair_vev(&ws[i], &wbars[j], charge));
    Ok(det(&m))
}

/// The block-ordered word whose expectation [`vev_det`] computes.
pub fn block_word(ws: &[LinearCombo], wbars: &[LinearCombo], charge: i64) -> FermionWord {
    let mut factors = ws.to_vec();
    factors.extend(wbars.iter().rev().cloned());
    FermionWord::new(Charges::One(charge), factors, Charges::One(charge))
}

/// `f(x) = sum_k x^k f_k` or `fbar(y) = sum_k y^{-k-1} fbar_k`, keeping
/// modes `-W <= k < W` of the chosen component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedField {
    pub kind: Kind,
    pub point: Complex64,
    pub window: i64,
    /// `None` for the one-component labelling, else `Some(1)` or `Some(2)`.
    pub component: Option<u8>,
}

impl TruncatedField {
    pub fn f(x: Complex64, window: i64) -> Self {
        TruncatedField {
            kind: Kind::F,
            point: x,
            window,
            component: None,
        }
    }

    pub fn fbar(y: Complex64, window: i64) -> Self {
        TruncatedField {
            kind: Kind::FBar,
            point: y,
            window,
            component: None,
        }
    }

    pub fn in_component(mut self, alpha: u8) -> Self {
        self.component = Some(alpha);
        self
    }

    pub fn combo(&self) -> Result<LinearCombo> {
        if self.window < 1 {
            return Err(Error::Invalid("window must be at least 1".into()));
        }
        if self.point == c(0.0) && self.kind == Kind::F {
            return Err(Error::Invalid("f(x) needs negative powers of x, x = 0 given".into()));
        }
        let label = |k: i64| match self.component {
            None => k,
            Some(alpha) => Generator::two_component(self.kind, alpha, k).index,
        };
        let mut out = LinearCombo::new(self.kind);
        for k in -self.window..self.window {
            let power = match self.kind {
                Kind::F => k,
                Kind::FBar => -k - 1,
            };
            if self.point == c(0.0) {
                if power == 0 {
                    out.add_term(label(k), c(1.0));
                }
                continue;
            }
            out.add_term(label(k), self.point.powi(power as i32));
        }
        Ok(out)
    }
}

/// `|y/x|^W / (|x| - |y|)`, the geometric tail of the Cauchy series.
pub fn cauchy_tail_bound(x: Complex64, y: Complex64, window: i64) -> f64 {
    (y.norm() / x.norm()).powi(window as i32) / (x.norm() - y.norm())
}

/// `<0| f(x) fbar(y) |0>` with truncated fields, i.e.
/// `sum_{n<W} y^n x^{-n-1}`.
pub fn cauchy_vev(x: Complex64, y: Complex64, window: i64) -> Result<Complex64> {
    if y.norm() >= x.norm() {
        return Err(Error::Region(format!("|y| = {} is not below |x| = {}", y.norm(), x.norm())));
    }
    let f = TruncatedField::f(x, window).combo()?;
    let fb = TruncatedField::fbar(y, window).combo()?;
    Ok(pair_vev(&f, &fb, 0))
}

/// Result of comparing an engine expectation with its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub engine: Complex64,
    pub closed_form: Complex64,
    pub residual: f64,
    /// Truncation tail plus a rounding allowance.
    pub bound: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.residual <= self.bound
    }

    fn new(engine: Complex64, closed_form: Complex64, tail: f64) -> Self {
        let rounding = 1e-12 * (1.0 + closed_form.norm());
        IdentityCheck {
            engine,
            closed_form,
            residual: (engine - closed_form).norm(),
            bound: tail + rounding,
        }
    }
}

fn check_region(xs: &[Complex64], ys: &[Complex64]) -> Result<()> {
    let min_x = xs.iter().map(|x| x.norm()).fold(f64::INFINITY, f64::min);
    for y in ys {
        if y.norm() >= 0.5 * min_x {
            return Err(Error::Region(format!(
                "|y| = {} must stay below half of min |x| = {min_x}",
                y.norm()
            )));
        }
    }
    Ok(())
}

fn cauchy_denominator(xs: &[Complex64], ys: &[Complex64]) -> Complex64 {
    let mut d = c(1.0);
    for x in xs {
        for y in ys {
            d *= x - y;
        }
    }
    d
}

/// Tail estimate for a product of `n m` truncated Cauchy kernels, scaled
/// by the size of the closed form.
fn product_tail(xs: &[Complex64], ys: &[Complex64], closed: Complex64, window: i64) -> f64 {
    let mut tail = 0.0;
    for x in xs {
        for y in ys {
            tail += cauchy_tail_bound(*x, *y, window) * (x - y).norm();
        }
    }
    tail * closed.norm().max(1.0)
}

fn fields(points: &[Complex64], kind: Kind, window: i64, component: Option<u8>) -> Result<Vec<LinearCombo>> {
    // operators appear as field(p_n) ... field(p_1)
    points
        .iter()
        .rev()
        .map(|&p| {
            let mut t = TruncatedField {
                kind,
                point: p,
                window,
                component: None,
            };
            if let Some(a) = component {
                t = t.in_component(a);
            }
            t.combo()
        })
        .collect()
}

/// `<n-m| f(x_n)...f(x_1) fbar(y_m)...fbar(y_1) |0>` against
/// `Delta_n(x) Delta_m(y) / prod (x_i - y_j)`. Points are given as
/// `[x_1, ..., x_n]` and `[y_1, ..., y_m]`.
pub fn rational_vev_check(xs: &[Complex64], ys: &[Complex64], window: i64, budget: u64) -> Result<IdentityCheck> {
    if xs.len() > 4 || ys.len() > 4 {
        return Err(Error::Invalid("at most four points of each kind".into()));
    }
    check_region(xs, ys)?;
    let charge = xs.len() as i64 - ys.len() as i64;
    let mut factors = fields(xs, Kind::F, window, None)?;
    factors.extend(fields(ys, Kind::FBar, window, None)?);
    let word = FermionWord::new(Charges::One(charge), factors, Charges::One(0));
    word.check_window(window)?;
    let engine = vev_general(&word, budget)?;
    let closed = vandermonde(xs) * vandermonde(ys) / cauchy_denominator(xs, ys);
    Ok(IdentityCheck::new(engine, closed, product_tail(xs, ys, closed, window)))
}

/// `<N| f(x_N) ... f(x_1) |0> = Delta_N(x)`. Only modes `0..N` contract,
/// so no truncation error enters.
pub fn vandermonde_check(xs: &[Complex64], window: i64, budget: u64) -> Result<IdentityCheck> {
    let word = FermionWord::new(Charges::One(xs.len() as i64), fields(xs, Kind::F, window, None)?, Charges::One(0));
    word.check_window(window)?;
    let engine = vev_general(&word, budget)?;
    Ok(IdentityCheck::new(engine, vandermonde(xs), 0.0))
}

/// Points for one two-component expectation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TwoComponentPoints {
    pub x1: Vec<Complex64>,
    pub y1: Vec<Complex64>,
    pub x2: Vec<Complex64>,
    pub y2: Vec<Complex64>,
}

/// Sign carried by the two-component closed form.
pub fn two_component_sign(n1: usize, m1: usize, m2: usize) -> f64 {
    if (m2 * (m1 + n1)) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `<n1-m1, n2-m2| F2 F1 Fbar1 Fbar2 |0,0>` against the product of the
/// one-component closed forms times `(-1)^{m2 (m1 + n1)}`.
pub fn two_component_check(p: &TwoComponentPoints, window: i64, budget: u64) -> Result<IdentityCheck> {
    if [&p.x1, &p.y1, &p.x2, &p.y2].iter().any(|v| v.len() > 3) {
        return Err(Error::Invalid("at most three points per group".into()));
    }
    check_region(&p.x1, &p.y1)?;
    check_region(&p.x2, &p.y2)?;
    let (n1, m1, n2, m2) = (p.x1.len(), p.y1.len(), p.x2.len(), p.y2.len());
    let mut factors = fields(&p.x2, Kind::F, window, Some(2))?;
    factors.extend(fields(&p.x1, Kind::F, window, Some(1))?);
    factors.extend(fields(&p.y1, Kind::FBar, window, Some(1))?);
    factors.extend(fields(&p.y2, Kind::FBar, window, Some(2))?);
    let left = Charges::Two(n1 as i64 - m1 as i64, n2 as i64 - m2 as i64);
    let word = FermionWord::new(left, factors, Charges::Two(0, 0));
    word.check_window(window)?;
    let engine = vev_general(&word, budget)?;
    let one = vandermonde(&p.x1) * vandermonde(&p.y1) / cauchy_denominator(&p.x1, &p.y1);
    let two = vandermonde(&p.x2) * vandermonde(&p.y2) / cauchy_denominator(&p.x2, &p.y2);
    let closed = one * two * two_component_sign(n1, m1, m2);
    let tail = product_tail(&p.x1, &p.y1, one, window) * two.norm().max(1.0)
        + product_tail(&p.x2, &p.y2, two, window) * one.norm().max(1.0);
    Ok(IdentityCheck::new(engine, closed, tail))
}

/// Sign relating a word to its second-component shift by `n`: moving
/// the first-component content past `n` extra second-component vacuum
/// generators gives `(-1)^{n (q1_left - q1_right)}`.
pub fn charge_shift_sign(word: &FermionWord, n: i64) -> Result<f64> {
    match (word.left, word.right) {
        (Charges::Two(a, _), Charges::Two(b, _)) => Ok(if (n * (a - b)).rem_euclid(2) == 0 { 1.0 } else { -1.0 }),
        _ => Err(Error::Invalid("charge shift needs a two-component word".into())),
    }
}

/// `|vev(word) - sign * vev(word shifted in the second component by n)|`
/// with the sign of [`charge_shift_sign`].
pub fn charge_shift_check(word: &FermionWord, n: i64, window: i64, budget: u64) -> Result<f64> {
    let shifted = word.shift_second_component(n)?;
    word.check_window(window)?;
    shifted.check_window(window)?;
    let a = vev_general(word, budget)?;
    let b = vev_general(&shifted, budget)?;
    Ok((a - charge_shift_sign(word, n)? * b).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(kind: Kind, i: i64) -> LinearCombo {
        Generator { kind, index: i }.into()
    }

    #[test]
    fn two_point_functions() {
        assert_eq!(pair_vev(&g(Kind::F, -1), &g(Kind::FBar, -1), 0), c(1.0));
        assert_eq!(pair_vev(&g(Kind::F, 0), &g(Kind::FBar, 0), 0), c(0.0));
        assert_eq!(pair_vev(&g(Kind::FBar, 0), &g(Kind::F, 0), 0), c(1.0));
        assert_eq!(pair_vev(&g(Kind::F, 2), &g(Kind::F, 3), 0), c(0.0));
        // a charge-2 vacuum fills modes 0 and 1
        assert_eq!(pair_vev(&g(Kind::F, 1), &g(Kind::FBar, 1), 2), c(1.0));
    }

    #[test]
    fn charged_vacua_are_normalised() {
        for n in -4..=4 {
            let w = FermionWord::new(Charges::One(n), vec![], Charges::One(n));
            assert_eq!(vev_general(&w, 1000).unwrap(), c(1.0), "charge {n}");
            let w = FermionWord::new(Charges::Two(n, 1 - n), vec![], Charges::Two(n, 1 - n));
            assert_eq!(vev_general(&w, 1000).unwrap(), c(1.0));
        }
        let w = FermionWord::new(Charges::One(1), vec![], Charges::One(0));
        assert_eq!(vev_general(&w, 1000).unwrap(), c(0.0));
    }

    #[test]
    fn small_vandermonde_words() {
        let x1 = Complex64::new(0.3, 1.1);
        let x2 = Complex64::new(-2.0, 0.5);
        let f = |x| TruncatedField::f(x, 8).combo().unwrap();
        let w = FermionWord::new(Charges::One(1), vec![f(x1)], Charges::One(0));
        assert!((vev_general(&w, 1000).unwrap() - c(1.0)).norm() < 1e-15);
        let w = FermionWord::new(Charges::One(2), vec![f(x2), f(x1)], Charges::One(0));
        assert!((vev_general(&w, 1000).unwrap() - (x2 - x1)).norm() < 1e-14);
        let swapped = FermionWord::new(Charges::One(2), vec![f(x1), f(x2)], Charges::One(0));
        assert!((vev_general(&swapped, 1000).unwrap() + (x2 - x1)).norm() < 1e-14);
    }

    #[test]
    fn determinant_form_small_cases() {
        assert_eq!(vev_det(&[g(Kind::F, -1)], &[g(Kind::FBar, -1)], 0).unwrap(), c(1.0));
        let w1 = LinearCombo::from_terms(Kind::F, [(-1, c(2.0)), (-2, c(1.0))]);
        let w2 = w1.scaled(Complex64::new(0.0, 3.0));
        let wb = [g(Kind::FBar, -1), g(Kind::FBar, -2)];
        assert_eq!(vev_det(&[w1, w2], &wb, 0).unwrap().norm(), 0.0);
        assert!(vev_det(&[g(Kind::F, -1)], &[], 0).is_err());
    }

    #[test]
    fn odd_words_and_repeats_vanish() {
        let w = FermionWord::vacuum(vec![g(Kind::F, -1), g(Kind::FBar, -1), g(Kind::F, -1)]);
        assert_eq!(vev_general(&w, 1000).unwrap(), c(0.0));
        let w = FermionWord::vacuum(vec![g(Kind::F, -1), g(Kind::F, -1), g(Kind::FBar, -1), g(Kind::FBar, -2)]);
        assert_eq!(vev_general(&w, 1000).unwrap(), c(0.0));
    }

    #[test]
    fn cauchy_kernel() {
        assert_eq!(cauchy_vev(c(2.0), c(0.0), 64).unwrap(), c(0.5));
        let v = cauchy_vev(c(2.0), c(1.0), 60).unwrap();
        assert!((v - c(1.0)).norm() < 1e-15);
        assert!(matches!(cauchy_vev(c(2.0), c(3.0), 64), Err(Error::Region(_))));
        let v = cauchy_vev(c(2.0), c(1.0), 8).unwrap();
        let err = (v - c(1.0)).norm();
        assert!(err <= cauchy_tail_bound(c(2.0), c(1.0), 8) * (1.0 + 1e-12));
        assert!(err > 0.5 * cauchy_tail_bound(c(2.0), c(1.0), 8));
    }

    #[test]
    fn rational_identity_small() {
        let r = rational_vev_check(&[c(2.0)], &[c(0.5)], 64, DEFAULT_STATE_BUDGET).unwrap();
        assert!((r.engine - c(1.0 / 1.5)).norm() < 1e-15);
        let r = rational_vev_check(&[c(2.0)], &[], 64, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(r.engine, c(1.0));
        assert!(rational_vev_check(&[c(2.0)], &[c(1.5)], 64, DEFAULT_STATE_BUDGET).is_err());
    }

    #[test]
    fn two_component_trivial() {
        let r = two_component_check(&TwoComponentPoints::default(), 16, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(r.engine, c(1.0));
        assert_eq!(r.closed_form, c(1.0));
        let p = TwoComponentPoints {
            x1: vec![c(2.0)],
            y2: vec![Complex64::new(0.3, 0.2)],
            ..Default::default()
        };
        let r = two_component_check(&p, 64, DEFAULT_STATE_BUDGET).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(two_component_sign(1, 0, 1), -1.0);
    }

    #[test]
    fn charge_shift_trivial() {
        let w = FermionWord::new(Charges::Two(0, 0), vec![], Charges::Two(0, 0));
        assert_eq!(charge_shift_check(&w, 1, 8, DEFAULT_STATE_BUDGET).unwrap(), 0.0);
        let f2 = LinearCombo::from(Generator::two_component(Kind::F, 2, -1));
        let w = FermionWord::new(Charges::Two(1, -1), vec![f2], Charges::Two(1, -2));
        assert_eq!(charge_shift_check(&w, 2, 8, DEFAULT_STATE_BUDGET).unwrap(), 0.0);
    }

    #[test]
    fn budget_is_enforced() {
        let factors = vec![g(Kind::F, -1); MAX_FACTORS + 1];
        assert!(matches!(vev_general(&FermionWord::vacuum(factors), 10), Err(Error::Budget(_))));
    }
}
