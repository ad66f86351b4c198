//! JSON documents for measures, insertion specs and reports.
//!
//! Complex numbers are written as `[re, im]`. Every float in a report is
//! printed with 17 significant digits, and object keys come out sorted,
//! so equal inputs give byte-identical files.

use crate::error::{Error, Result};
use crate::evaluator::InsertionSpec;
use crate::measure::{build_grid_measure, gauss_legendre, Atom, Measure, QuadNode, WeightRule};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;

pub const SCHEMA_VERSION: &str = "1.0";

/// A complex number in a document: `[re, im]` or a bare real.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum CNum {
    Pair([f64; 2]),
    Real(f64),
}

impl From<CNum> for Complex64 {
    fn from(v: CNum) -> Self {
        match v {
            CNum::Pair([re, im]) => Complex64::new(re, im),
            CNum::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomDoc {
    x: CNum,
    y: CNum,
    w: CNum,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussLegendreDoc {
    n: usize,
    #[serde(default = "minus_one")]
    a: f64,
    #[serde(default = "plus_one")]
    b: f64,
}

fn minus_one() -> f64 {
    -1.0
}

fn plus_one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum NodesDoc {
    Explicit(Vec<CNum>),
    GaussLegendre { gauss_legendre: GaussLegendreDoc },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridDoc {
    x_nodes: NodesDoc,
    y_nodes: NodesDoc,
    weight: String,
    x_weights: Option<Vec<CNum>>,
    y_weights: Option<Vec<CNum>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureDoc {
    label: Option<String>,
    atoms: Option<Vec<AtomDoc>>,
    grid: Option<GridDoc>,
}

fn nodes(doc: NodesDoc, weights: Option<Vec<CNum>>, axis: &str) -> Result<Vec<QuadNode>> {
    let mut out = match doc {
        NodesDoc::Explicit(v) => v.into_iter().map(|p| QuadNode::unit(p.into())).collect::<Vec<_>>(),
        NodesDoc::GaussLegendre { gauss_legendre: g } => {
            if g.n == 0 {
                return Err(Error::Invalid(format!("{axis}: Gauss-Legendre needs n >= 1")));
            }
            gauss_legendre(g.n, g.a, g.b)
        }
    };
    if let Some(w) = weights {
        if w.len() != out.len() {
            return Err(Error::Invalid(format!(
                "{axis}: {} weights for {} nodes",
                w.len(),
                out.len()
            )));
        }
        for (node, wt) in out.iter_mut().zip(w) {
            node.weight = wt.into();
        }
    }
    Ok(out)
}

/// Parses a measure document in either the atom or the grid form.
pub fn parse_measure(text: &str) -> Result<Measure> {
    let doc: MeasureDoc = serde_json::from_str(text)?;
    let label = doc.label.unwrap_or_else(|| "measure".to_string());
    match (doc.atoms, doc.grid) {
        (Some(atoms), None) => Measure::new(
            label,
            atoms.into_iter().map(|a| Atom::new(a.x.into(), a.y.into(), a.w.into())),
        ),
        (None, Some(g)) => {
            let rule = WeightRule::parse(&g.weight)?;
            let xs = nodes(g.x_nodes, g.x_weights, "x_nodes")?;
            let ys = nodes(g.y_nodes, g.y_weights, "y_nodes")?;
            build_grid_measure(label, &xs, &ys, &rule)
        }
        _ => Err(Error::Parse("a measure needs exactly one of \"atoms\" or \"grid\"".into())),
    }
}

pub fn load_measure(path: &Path) -> Result<Measure> {
    parse_measure(&std::fs::read_to_string(path)?)
}

pub fn complex_value(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_list(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|&z| complex_value(z)).collect())
}

pub fn measure_to_value(m: &Measure) -> Value {
    let atoms: Vec<Value> = m
        .atoms()
        .iter()
        .map(|a| json!({"x": complex_value(a.x), "y": complex_value(a.y), "w": complex_value(a.w)}))
        .collect();
    json!({"label": m.label(), "atoms": atoms})
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    #[serde(rename = "N")]
    n: usize,
    #[serde(default)]
    xi: Vec<CNum>,
    #[serde(default)]
    zeta: Vec<CNum>,
    #[serde(default)]
    eta: Vec<CNum>,
    #[serde(default)]
    mu: Vec<CNum>,
}

/// `{"N": 3, "xi": [[re, im], ...], "zeta": ..., "eta": ..., "mu": ...}`;
/// missing families are empty.
pub fn parse_spec(text: &str) -> Result<InsertionSpec> {
    let d: SpecDoc = serde_json::from_str(text)?;
    if d.n == 0 {
        return Err(Error::Invalid("N must be at least 1".into()));
    }
    let conv = |v: Vec<CNum>| v.into_iter().map(Complex64::from).collect();
    let spec = InsertionSpec::new(d.n)
        .with_xi(conv(d.xi))
        .with_zeta(conv(d.zeta))
        .with_eta(conv(d.eta))
        .with_mu(conv(d.mu));
    for z in spec.xi.iter().chain(&spec.zeta).chain(&spec.eta).chain(&spec.mu) {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite(format!("insertion point {z}")));
        }
    }
    Ok(spec)
}

pub fn load_spec(path: &Path) -> Result<InsertionSpec> {
    parse_spec(&std::fs::read_to_string(path)?)
}

pub fn spec_to_value(s: &InsertionSpec) -> Value {
    json!({
        "N": s.n,
        "xi": complex_list(&s.xi),
        "zeta": complex_list(&s.zeta),
        "eta": complex_list(&s.eta),
        "mu": complex_list(&s.mu),
    })
}

/// serde_json formatter printing floats as `{:.16e}`.
struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            // JSON has no literal for these
            writer.write_all(b"null")
        }
    }
}

/// Serialises `v` with 17 significant digits per float and a trailing
/// newline.
pub fn to_json_string(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    serde::Serialize::serialize(v, &mut ser).expect("serialising a Value cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// Wraps a command payload into a report with its schema version.
pub fn report(command: &str, payload: Value) -> Value {
    let mut doc = json!({"schema_version": SCHEMA_VERSION, "command": command});
    if let (Value::Object(d), Value::Object(p)) = (&mut doc, payload) {
        d.extend(p);
    }
    doc
}

/// Minimal CSV with a header row; fields are quoted when needed.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    fn field(s: &str) -> String {
        if s.contains([',', '"', '\n']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_string()
        }
    }
    let mut out = header.iter().map(|h| field(h)).collect::<Vec<_>>().join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.iter().map(|s| field(s)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
