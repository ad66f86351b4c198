//! Finite atomic coupled measures and their bimoments.
//!
//! A measure `dmu(x, y)` is stored as a list of weighted points in
//! `C x C`; every integral against it is an exact finite sum.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg::CMatrix;
use crate::summation::ComplexSum;
use num_complex::Complex64;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub x: Complex64,
    pub y: Complex64,
    pub w: Complex64,
}

impl Atom {
    pub fn new(x: Complex64, y: Complex64, w: Complex64) -> Self {
        Atom { x, y, w }
    }
}

/// Validated atomic measure: at least one atom, nonzero finite weights,
/// pairwise distinct support points. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    label: String,
    atoms: Vec<Atom>,
}

fn key(z: Complex64) -> (u64, u64) {
    // +0.0 and -0.0 name the same point
    let canon = |v: f64| if v == 0.0 { 0.0f64.to_bits() } else { v.to_bits() };
    (canon(z.re), canon(z.im))
}

fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl Measure {
    /// Builds a measure, merging atoms that share `(x, y)` by summing
    /// their weights (first occurrence fixes the position in the list)
    /// and dropping atoms whose weight ends up zero.
    pub fn new(label: impl Into<String>, atoms: impl IntoIterator<Item = Atom>) -> Result<Self> {
        let mut merged: Vec<Atom> = Vec::new();
        let mut index: HashMap<((u64, u64), (u64, u64)), usize> = HashMap::new();
        for a in atoms {
            if !is_finite(a.x) || !is_finite(a.y) || !is_finite(a.w) {
                return Err(Error::NonFinite(format!(
                    "atom ({}, {}) with weight {}",
                    a.x, a.y, a.w
                )));
            }
            match index.entry((key(a.x), key(a.y))) {
                std::collections::hash_map::Entry::Occupied(e) => merged[*e.get()].w += a.w,
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(merged.len());
                    merged.push(a);
                }
            }
        }
        merged.retain(|a| a.w != Complex64::new(0.0, 0.0));
        if merged.is_empty() {
            return Err(Error::Invalid("measure has no atoms with nonzero weight".into()));
        }
        Ok(Measure {
            label: label.into(),
            atoms: merged,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `sum_atoms w x^j y^k`, compensated, in atom order.
    pub fn bimoment(&self, j: usize, k: usize) -> Result<Complex64> {
        let mut acc = ComplexSum::new();
        for a in &self.atoms {
            acc.add(a.w * a.x.powu(j as u32) * a.y.powu(k as u32));
        }
        let v = acc.value();
        if !is_finite(v) {
            return Err(Error::NonFinite(format!(
                "bimoment B[{j}][{k}] overflowed; degrees too high for the coordinate magnitudes"
            )));
        }
        Ok(v)
    }

    pub fn bimoment_matrix(&self, t: usize) -> Result<BimomentMatrix> {
        if t == 0 {
            return Err(Error::Invalid("bimoment matrix size must be at least 1".into()));
        }
        let mut entries = CMatrix::zeros(t, t);
        for j in 0..t {
            for k in 0..t {
                entries[(j, k)] = self.bimoment(j, k)?;
            }
        }
        Ok(BimomentMatrix { entries })
    }

    /// Multiplies each weight by `exp(V(x, t1) - V(y, t2))` with
    /// `V(z, t) = sum_{n>=0} t_n z^n`.
    pub fn deform(&self, t1: &[Complex64], t2: &[Complex64]) -> Result<Measure> {
        let potential = |z: Complex64, t: &[Complex64]| {
            // Horner, highest time first
            t.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &tn| acc * z + tn)
        };
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            let factor = (potential(a.x, t1) - potential(a.y, t2)).exp();
            let w = a.w * factor;
            if !is_finite(w) {
                return Err(Error::NonFinite(format!(
                    "deformation factor overflowed at atom ({}, {})",
                    a.x, a.y
                )));
            }
            atoms.push(Atom { w, ..*a });
        }
        Measure::new(format!("{}+deformed", self.label), atoms)
    }

    pub fn scaled(&self, c: Complex64) -> Result<Measure> {
        Measure::new(
            self.label.clone(),
            self.atoms.iter().map(|a| Atom { w: a.w * c, ..*a }),
        )
    }

    /// The measure with the roles of `x` and `y` exchanged.
    pub fn transposed(&self) -> Measure {
        Measure {
            label: format!("{}^T", self.label),
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    x: a.y,
                    y: a.x,
                    w: a.w,
                })
                .collect(),
        }
    }

    pub fn total_weight(&self) -> Complex64 {
        crate::summation::complex_sum(self.atoms.iter().map(|a| a.w))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BimomentMatrix {
    entries: CMatrix,
}

impl BimomentMatrix {
    pub fn from_matrix(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::Invalid("bimoment matrix must be square and nonempty".into()));
        }
        if entries.iter().any(|z| !is_finite(*z)) {
            return Err(Error::NonFinite("bimoment matrix entry".into()));
        }
        Ok(BimomentMatrix { entries })
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Determinants of the leading `n x n` blocks for `n = 1..=size`.
    pub fn leading_minors(&self) -> Vec<Complex64> {
        (1..=self.size())
            .map(|n| crate::linalg::det(&self.entries.view((0, 0), (n, n)).into_owned()))
            .collect()
    }
}

/// A quadrature node: position and quadrature weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadNode {
    pub point: Complex64,
    pub weight: Complex64,
}

impl QuadNode {
    pub fn unit(point: Complex64) -> Self {
        QuadNode {
            point,
            weight: Complex64::new(1.0, 0.0),
        }
    }
}

/// Density used by [`build_grid_measure`].
#[derive(Debug, Clone, PartialEq)]
pub enum WeightRule {
    One,
    /// `exp(x y)`
    ExpXY,
    /// `x y`
    XY,
    Expr(Expr),
}

impl WeightRule {
    /// Named built-ins first, otherwise an expression over `x` and `y`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "one" | "1" => Ok(WeightRule::One),
            "exp_xy" => Ok(WeightRule::ExpXY),
            "xy" => Ok(WeightRule::XY),
            other => Expr::parse(other).map(WeightRule::Expr),
        }
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        match self {
            WeightRule::One => Complex64::new(1.0, 0.0),
            WeightRule::ExpXY => (x * y).exp(),
            WeightRule::XY => x * y,
            WeightRule::Expr(e) => e.eval(x, y),
        }
    }
}

/// Atoms on the product grid, weight `rule(x, y) * wx * wy`.
pub fn build_grid_measure(
    label: impl Into<String>,
    x_nodes: &[QuadNode],
    y_nodes: &[QuadNode],
    rule: &WeightRule,
) -> Result<Measure> {
    if x_nodes.is_empty() || y_nodes.is_empty() {
        return Err(Error::Invalid("grid node sequences must be nonempty".into()));
    }
    let mut atoms = Vec::with_capacity(x_nodes.len() * y_nodes.len());
    for xn in x_nodes {
        for yn in y_nodes {
            let d = rule.eval(xn.point, yn.point);
            if !is_finite(d) {
                return Err(Error::NonFinite(format!(
                    "weight rule at ({}, {})",
                    xn.point, yn.point
                )));
            }
            atoms.push(Atom::new(xn.point, yn.point, d * xn.weight * yn.weight));
        }
    }
    Measure::new(label, atoms)
}

/// Gauss–Legendre nodes and weights on `[a, b]` (Newton iteration on
/// the three-term recurrence).
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<QuadNode> {
    assert!(n >= 1);
    let mut out = vec![
        QuadNode {
            point: Complex64::new(0.0, 0.0),
            weight: Complex64::new(0.0, 0.0)
        };
        n
    ];
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        out[i] = QuadNode {
            point: Complex64::new(mid - half * z, 0.0),
            weight: Complex64::new(half * w, 0.0),
        };
        out[n - 1 - i] = QuadNode {
            point: Complex64::new(mid + half * z, 0.0),
            weight: Complex64::new(half * w, 0.0),
        };
    }
    out
}
