//! Command-line front end. The binary only forwards `std::env::args` to
//! [`run`], which returns the process exit code.

use crate::biortho::{BiorthoSystem, DEFAULT_EPS_POLE};
use crate::error::{Error, Result};
use crate::evaluator::{evaluate, evaluate_all_applicable, evaluate_case, CaseKind, EvalReport, InsertionSpec};
use crate::io::{self, complex_list, complex_value, fmt_f64, report, to_csv, to_json_string};
use crate::kernels::KernelContext;
use crate::linalg::CMatrix;
use crate::measure::Measure;
use crate::oracle::{brute_force_in, detn_in, DEFAULT_TERM_BUDGET};
use crate::sampling::DEFAULT_SEED;
use crate::verify::{self, CheckLine, VerifyConfig};
use crate::wick::DEFAULT_WINDOW;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "twomat", version, about = "Two-matrix-model integrals via biorthogonal polynomials")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Relative tolerance overriding the per-suite defaults
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Minimum distance between a pole and the support or another point
    #[arg(long, global = true, default_value_t = DEFAULT_EPS_POLE)]
    pub eps_pole: f64,
    /// Truncation size T of the biorthogonal system
    #[arg(long, global = true)]
    pub trunc: Option<usize>,
    /// Term budget for brute-force sums and Wick pairings
    #[arg(long, global = true, default_value_t = DEFAULT_TERM_BUDGET)]
    pub budget: u64,
    /// Seed for randomized suites
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleChoice {
    Brute,
    Detn,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Xi,
    Zeta,
    Eta,
    Mu,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bimoment matrix and its leading minors
    Bimoments { measure: PathBuf },
    /// Norms, coefficient tables and residuals of the biorthogonal system
    Biortho { measure: PathBuf },
    /// Evaluate I_N through the determinant formula
    Eval {
        measure: PathBuf,
        spec: PathBuf,
        /// A specific regime, or every applicable one
        #[arg(long)]
        case: Option<String>,
        /// Move the first point of this family along a line (CSV sweep)
        #[arg(long, requires = "to")]
        sweep: Option<Family>,
        /// End point of the sweep as "re,im"
        #[arg(long)]
        to: Option<String>,
        #[arg(long, default_value_t = 11)]
        steps: usize,
    },
    /// Brute-force and determinant oracles
    Oracle {
        measure: PathBuf,
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = OracleChoice::Both)]
        method: OracleChoice,
    },
    /// Run every measure suite
    Verify { measure: PathBuf },
    /// Run the Wick identity suite
    WickCheck {
        /// Modes per sign kept in truncated fields
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: i64,
    },
}

/// Outcome of a command before it is written out.
struct Output {
    json: Value,
    csv: (Vec<&'static str>, Vec<Vec<String>>),
    passed: bool,
}

impl Output {
    fn new(json: Value, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        Output {
            json,
            csv: (header, rows),
            passed: true,
        }
    }
}

fn validate(cfg: &RunConfig) -> Result<()> {
    if let Some(t) = cfg.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Invalid(format!("--tol must be positive, got {t}")));
        }
    }
    if !(cfg.eps_pole > 0.0 && cfg.eps_pole.is_finite()) {
        return Err(Error::Invalid(format!("--eps-pole must be positive, got {}", cfg.eps_pole)));
    }
    if cfg.trunc == Some(0) {
        return Err(Error::Invalid("--trunc must be at least 1".into()));
    }
    Ok(())
}

fn matrix_value(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_value(m[(i, j)])).collect()))
            .collect(),
    )
}

fn matrix_rows(m: &CMatrix) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            rows.push(vec![i.to_string(), j.to_string(), fmt_f64(z.re), fmt_f64(z.im)]);
        }
    }
    rows
}

fn cmd_bimoments(m: &Measure, t: usize) -> Result<Output> {
    let b = m.bimoment_matrix(t)?;
    let json = report(
        "bimoments",
        json!({
            "measure": m.label(),
            "atoms": m.len(),
            "T": t,
            "matrix": matrix_value(b.entries()),
            "leading_minors": complex_list(&b.leading_minors()),
        }),
    );
    Ok(Output::new(json, vec!["j", "k", "re", "im"], matrix_rows(b.entries())))
}

fn cmd_biortho(m: &Measure, t: usize) -> Result<Output> {
    let b = m.bimoment_matrix(t)?;
    let sys = BiorthoSystem::factorize(&b, t)?;
    let sqrt_h: Vec<Complex64> = (0..t as i64).map(|n| sys.sqrt_h(n)).collect::<Result<_>>()?;
    let json = report(
        "biortho",
        json!({
            "measure": m.label(),
            "T": t,
            "h": complex_list(sys.norms()),
            "sqrt_h": complex_list(&sqrt_h),
            "K": matrix_value(sys.k()),
            "Kbar": matrix_value(sys.kbar()),
            "orthonormality_residual": sys.orthonormality_residual(m)?,
            "factorization_residual": sys.factorization_residual(&b),
        }),
    );
    let rows = sys
        .norms()
        .iter()
        .zip(&sqrt_h)
        .enumerate()
        .map(|(n, (h, r))| vec![n.to_string(), fmt_f64(h.re), fmt_f64(h.im), fmt_f64(r.re), fmt_f64(r.im)])
        .collect();
    Ok(Output::new(json, vec!["n", "h_re", "h_im", "sqrt_h_re", "sqrt_h_im"], rows))
}

fn eval_value(r: &EvalReport) -> Value {
    json!({
        "value": complex_value(r.value),
        "case": r.case.kind.name(),
        "n1": r.case.n1,
        "n2": r.case.n2,
        "applicable": r.applicable.iter().map(|k| k.name()).collect::<Vec<_>>(),
        "sign": r.sign,
        "prefactor": complex_value(r.prefactor),
        "det_g": complex_value(r.det_g),
        "g": matrix_value(&r.g),
        "condition": r.condition,
        "low_confidence": r.low_confidence,
        "cancelled_pairs": r.cancelled_pairs,
    })
}

fn eval_row(label: String, r: &EvalReport) -> Vec<String> {
    vec![
        label,
        r.case.kind.name().to_string(),
        fmt_f64(r.value.re),
        fmt_f64(r.value.im),
        fmt_f64(r.condition),
    ]
}

/// The smallest truncation the spec needs.
fn required_trunc(spec: &InsertionSpec) -> usize {
    let k = spec.counts();
    k.n.max(k.n1()).max(k.n2()).max(1) as usize
}

fn parse_case(s: &str) -> Result<Option<CaseKind>> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(None);
    }
    CaseKind::ALL
        .into_iter()
        .find(|k| k.name().eq_ignore_ascii_case(s))
        .map(Some)
        .ok_or_else(|| Error::Invalid(format!("unknown case {s:?}; expected C1, C1m, C2, C2m, C3, C3m or all")))
}

fn parse_point(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| Error::Parse(format!("{p:?}: {e}")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Error::Parse(format!("expected \"re,im\", got {s:?}"))),
    }
}

fn family_mut(spec: &mut InsertionSpec, f: Family) -> &mut Vec<Complex64> {
    match f {
        Family::Xi => &mut spec.xi,
        Family::Zeta => &mut spec.zeta,
        Family::Eta => &mut spec.eta,
        Family::Mu => &mut spec.mu,
    }
}

struct EvalArgs<'a> {
    case: Option<&'a str>,
    sweep: Option<Family>,
    to: Option<&'a str>,
    steps: usize,
}

fn cmd_eval(m: &Measure, spec: &InsertionSpec, cfg: &RunConfig, a: EvalArgs<'_>) -> Result<Output> {
    let t = cfg.trunc.unwrap_or_else(|| required_trunc(spec));
    let sys = BiorthoSystem::from_measure(m, t)?;
    let ctx = KernelContext::new(&sys, m).with_eps_pole(cfg.eps_pole);
    let header = vec!["label", "case", "re", "im", "condition"];
    if let Some(family) = a.sweep {
        let end = parse_point(a.to.unwrap_or_default())?;
        let start = *family_mut(&mut spec.clone(), family)
            .first()
            .ok_or_else(|| Error::Invalid(format!("the spec has no {family:?} point to sweep")))?;
        if a.steps < 2 {
            return Err(Error::Invalid("--steps must be at least 2".into()));
        }
        let mut points = Vec::new();
        let mut rows = Vec::new();
        for i in 0..a.steps {
            let s = i as f64 / (a.steps - 1) as f64;
            let z = start + (end - start) * s;
            let mut sp = spec.clone();
            family_mut(&mut sp, family)[0] = z;
            let r = evaluate(&sp, &ctx)?;
            points.push(json!({"point": complex_value(z), "value": complex_value(r.value), "case": r.case.kind.name()}));
            rows.push(eval_row(format!("{i}"), &r));
        }
        let json = report("eval", json!({"T": t, "spec": io::spec_to_value(spec), "sweep": points}));
        return Ok(Output::new(json, header, rows));
    }
    let reports = match a.case.map(parse_case).transpose()?.flatten() {
        Some(kind) => vec![evaluate_case(spec, &ctx, kind)?],
        None if a.case.is_some() => evaluate_all_applicable(spec, &ctx)?,
        None => vec![evaluate(spec, &ctx)?],
    };
    let rows = reports.iter().map(|r| eval_row(r.case.kind.name().to_string(), r)).collect();
    let mut payload = json!({"T": t, "spec": io::spec_to_value(spec)});
    if reports.len() == 1 {
        payload["result"] = eval_value(&reports[0]);
    } else {
        let values: Vec<Complex64> = reports.iter().map(|r| r.value).collect();
        payload["results"] = Value::Array(reports.iter().map(eval_value).collect());
        payload["max_relative_spread"] = json!(crate::evaluator::max_relative_spread(&values));
    }
    Ok(Output::new(report("eval", payload), header, rows))
}

fn cmd_oracle(m: &Measure, spec: &InsertionSpec, cfg: &RunConfig, method: OracleChoice) -> Result<Output> {
    let mut results = Vec::new();
    if matches!(method, OracleChoice::Brute | OracleChoice::Both) {
        results.push(brute_force_in(m, spec, cfg.budget)?);
    }
    if matches!(method, OracleChoice::Detn | OracleChoice::Both) {
        results.push(detn_in(m, spec)?);
    }
    let mut payload = json!({
        "spec": io::spec_to_value(spec),
        "results": results.iter().map(|r| json!({
            "method": r.method,
            "value": complex_value(r.value),
            "terms": r.terms,
        })).collect::<Vec<_>>(),
    });
    if results.len() == 2 {
        payload["cross_relative_difference"] = json!(verify::relative_error(results[0].value, results[1].value));
    }
    let rows = results
        .iter()
        .map(|r| {
            vec![
                serde_json::to_value(r.method).unwrap().as_str().unwrap_or_default().to_string(),
                fmt_f64(r.value.re),
                fmt_f64(r.value.im),
                r.terms.to_string(),
            ]
        })
        .collect();
    Ok(Output::new(report("oracle", payload), vec!["method", "re", "im", "terms"], rows))
}

fn suite_output(command: &str, lines: Vec<CheckLine>, extra: Value) -> Output {
    let passed = verify::all_passed(&lines);
    let mut payload = json!({"passed": passed, "checks": lines});
    if let (Value::Object(p), Value::Object(e)) = (&mut payload, extra) {
        p.extend(e);
    }
    let rows = lines
        .iter()
        .map(|l| {
            vec![
                l.name.clone(),
                l.passed.to_string(),
                fmt_f64(l.worst),
                fmt_f64(l.tolerance),
                l.trials.to_string(),
                l.note.clone(),
            ]
        })
        .collect();
    let mut out = Output::new(
        report(command, payload),
        vec!["name", "passed", "worst", "tolerance", "trials", "note"],
        rows,
    );
    out.passed = passed;
    out
}

fn verify_config(cfg: &RunConfig) -> VerifyConfig {
    let d = VerifyConfig::default();
    VerifyConfig {
        tol: cfg.tol,
        eps_pole: cfg.eps_pole,
        trunc: cfg.trunc.unwrap_or(d.trunc),
        budget: cfg.budget,
        seed: cfg.seed,
        ..d
    }
}

fn execute(cli: &Cli) -> Result<Output> {
    let cfg = &cli.config;
    validate(cfg)?;
    let load = |p: &Path| io::load_measure(p);
    match &cli.command {
        Command::Bimoments { measure } => cmd_bimoments(&load(measure)?, cfg.trunc.unwrap_or(8)),
        Command::Biortho { measure } => cmd_biortho(&load(measure)?, cfg.trunc.unwrap_or(8)),
        Command::Eval {
            measure,
            spec,
            case,
            sweep,
            to,
            steps,
        } => cmd_eval(
            &load(measure)?,
            &io::load_spec(spec)?,
            cfg,
            EvalArgs {
                case: case.as_deref(),
                sweep: *sweep,
                to: to.as_deref(),
                steps: *steps,
            },
        ),
        Command::Oracle { measure, spec, method } => cmd_oracle(&load(measure)?, &io::load_spec(spec)?, cfg, *method),
        Command::Verify { measure } => {
            let m = load(measure)?;
            let vc = verify_config(cfg);
            let lines = verify::run_measure_suites(&m, &vc)?;
            Ok(suite_output("verify", lines, json!({"measure": m.label(), "seed": cfg.seed, "T": vc.trunc})))
        }
        Command::WickCheck { window } => {
            if *window < 1 {
                return Err(Error::Invalid("--window must be at least 1".into()));
            }
            let vc = VerifyConfig {
                window: *window,
                ..verify_config(cfg)
            };
            let lines = verify::run_wick_suite(&vc)?;
            Ok(suite_output("wick-check", lines, json!({"seed": cfg.seed, "window": window})))
        }
    }
}

fn emit(cfg: &RunConfig, out: &Output) -> Result<()> {
    let text = match cfg.format {
        Format::Json => to_json_string(&out.json),
        Format::Csv => to_csv(&out.csv.0, &out.csv.1),
    };
    match &cfg.out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { EXIT_OK };
        }
    };
    let result = execute(&cli).and_then(|out| {
        emit(&cli.config, &out)?;
        Ok(out.passed)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("twomat: verification failed");
            EXIT_VERIFY_FAILED
        }
        Err(e) => {
            eprintln!("twomat: {e}");
            e.exit_code()
        }
    }
}
