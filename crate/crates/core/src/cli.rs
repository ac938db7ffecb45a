//! The `cxhyp` command line: classification, pair invariants, conjugacy
//! tests and seeded random instances, all over JSON.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::form::{su_residuals, Isometry};
use crate::json::{matrix_from_value, matrix_to_value, vector_to_wire};
use crate::loxodromic::{
    char_poly, classify_with, eigen_structure_with, is_regular_with, trace_tuple, CharPoly, IsometryType,
    Multiplicity, TraceTuple,
};
use crate::pair::{
    canonical_eigenpoint, decide_conjugacy, is_nonsingular_with, make_pair_with, normalize_good_i,
    normalize_nonsingular, pair_flags, profile_of_tuple, reference_eigenpoint_with, AnchorConvention,
    CollisionPolicy, ConjugacyOptions, LoxodromicPair, Outcome,
};
use crate::random::{random_loxodromic, seeded_rng};
use crate::tol::Tolerances;

pub const EXIT_OK: u8 = 0;
pub const EXIT_PARSE: u8 = 1;
pub const EXIT_INVALID_MATRIX: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;
pub const EXIT_UNDETERMINED: u8 = 4;

/// Resampling cap for `random`.
const MAX_DRAWS: usize = 1000;

/// One invocation of the tool.
#[derive(Debug, Clone, Parser)]
#[command(name = "cxhyp", version, about = "Loxodromic elements and pairs in SU(n,1)")]
pub struct JobSpec {
    #[command(subcommand)]
    pub command: Command,
    /// Residual bound for verified conjugators [default: $CXHYP_TOL, else 1e-7].
    #[arg(long, global = true, value_parser = positive)]
    pub tol: Option<f64>,
    /// Membership tolerance applied to input matrices, relative to max(1, ‖M‖²).
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = positive)]
    pub group_tol: f64,
    /// Seed for rephasings, centralizer sampling and random instances.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Classify one matrix.
    Classify(Inputs),
    /// Invariant profile of a pair `{"A": …, "B": …}`.
    Pair {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum, default_value_t = PairMode::Reference)]
        mode: PairMode,
    },
    /// Decide whether two pairs are conjugate.
    ConjugateTest {
        #[command(flatten)]
        inputs: Inputs,
        /// Number of centralizer samples in the last stage.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Emit a seeded random instance.
    Random {
        #[arg(long, value_enum)]
        kind: RandomKind,
        #[arg(long, value_parser = dimension)]
        n: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Inputs {
    /// JSON documents to read, in order.
    pub files: Vec<PathBuf>,
    /// Inline JSON documents, used instead of files.
    #[arg(long, conflicts_with = "files")]
    pub inline: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairMode {
    Reference,
    Canonical,
    Nonsingular,
    #[value(name = "goodI", alias = "good-i")]
    GoodI,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RandomKind {
    Element,
    Pair,
    NonsingularPair,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("tolerance must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn dimension(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        Ok(_) => Err("n must be at least 1".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// A failed command: exit code plus a JSON report for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: u8,
    pub report: Value,
}

impl Failure {
    fn parse(msg: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_PARSE,
            report: json!({ "error": msg.to_string() }),
        }
    }

    fn precondition(err: &Error, pair: Option<&LoxodromicPair>, tol: &Tolerances) -> Self {
        let mut report = Map::new();
        report.insert("error".into(), Value::String(err.to_string()));
        if let Some(flags) = pair.and_then(|p| pair_flags(p, tol).ok()) {
            report.insert("flags".into(), serde_json::to_value(flags).expect("flags serialize"));
        }
        Self {
            code: EXIT_PRECONDITION,
            report: Value::Object(report),
        }
    }
}

/// Result of a successful command. `code` is nonzero only for an
/// undetermined verdict, whose report is still written.
#[derive(Debug, Clone, PartialEq)]
pub struct Success {
    pub code: u8,
    pub value: Value,
}

impl From<Value> for Success {
    fn from(value: Value) -> Self {
        Self { code: EXIT_OK, value }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassifyReport {
    #[serde(rename = "type")]
    pub kind: IsometryType,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phis: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regular: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resultant: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<Multiplicity>,
    pub char_poly: CharPoly,
    pub traces: TraceTuple,
}

pub fn classify_report(a: &Isometry, tol: &Tolerances) -> crate::error::Result<ClassifyReport> {
    let kind = classify_with(a, tol)?;
    let mut report = ClassifyReport {
        kind,
        r: None,
        theta: None,
        phis: None,
        regular: None,
        resultant: None,
        multiplicity: None,
        char_poly: char_poly(a),
        traces: trace_tuple(a),
    };
    if kind == IsometryType::Loxodromic {
        let s = eigen_structure_with(a, tol)?;
        let reg = is_regular_with(a, tol)?;
        report.multiplicity = Some(s.multiplicity());
        report.r = Some(s.r);
        report.theta = Some(s.theta);
        report.phis = Some(s.phis);
        report.regular = Some(reg.regular);
        report.resultant = Some([reg.resultant.re, reg.resultant.im]);
    }
    Ok(report)
}

/// Parse arguments, run, print, and return the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let spec = match JobSpec::try_parse_from(args) {
        Ok(spec) => spec,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&spec) {
        Ok(success) => match emit(&spec, &success.value) {
            Ok(()) => success.code,
            Err(e) => {
                eprintln!("{}", json!({ "error": format!("cannot write output: {e}") }));
                EXIT_PARSE
            }
        },
        Err(failure) => {
            eprintln!("{}", pretty(&failure.report));
            failure.code
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn emit(spec: &JobSpec, v: &Value) -> std::io::Result<()> {
    let mut text = pretty(v);
    text.push('\n');
    match &spec.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

pub const TOL_ENV: &str = "CXHYP_TOL";

/// The `--tol` flag, else `CXHYP_TOL`, else the default bound.
pub fn verify_tolerance(spec: &JobSpec) -> Result<f64, Failure> {
    if let Some(t) = spec.tol {
        return Ok(t);
    }
    match std::env::var(TOL_ENV) {
        Ok(text) => positive(text.trim()).map_err(|e| Failure::parse(format!("{TOL_ENV}: {e}"))),
        Err(_) => Ok(Tolerances::default().verify),
    }
}

/// Run a parsed job without touching stdout.
pub fn execute(spec: &JobSpec) -> Result<Success, Failure> {
    let tol = Tolerances {
        verify: verify_tolerance(spec)?,
        group: spec.group_tol,
        ..Tolerances::default()
    };
    match &spec.command {
        Command::Classify(inputs) => {
            let doc = read_documents(inputs, 1)?.remove(0);
            let a = read_matrix(&doc, "matrix", &tol)?;
            let report = classify_report(&a, &tol).map_err(|e| Failure::precondition(&e, None, &tol))?;
            Ok(to_value(&report).into())
        }
        Command::Pair { inputs, mode } => {
            let doc = read_documents(inputs, 1)?.remove(0);
            let pair = read_pair(&doc, &tol)?;
            pair_report(&pair, *mode, spec.seed, &tol)
                .map(Success::from)
                .map_err(|e| Failure::precondition(&e, Some(&pair), &tol))
        }
        Command::ConjugateTest { inputs, budget } => {
            let docs = read_documents(inputs, 2)?;
            let p = read_pair(&docs[0], &tol)?;
            let q = read_pair(&docs[1], &tol)?;
            let opts = ConjugacyOptions {
                tol: tol.verify,
                budget: *budget,
                seed: spec.seed,
                tolerances: tol,
            };
            let verdict = decide_conjugacy(&p, &q, &opts).map_err(|e| Failure::precondition(&e, None, &tol))?;
            let code = if verdict.outcome == Outcome::Undetermined {
                EXIT_UNDETERMINED
            } else {
                EXIT_OK
            };
            Ok(Success {
                code,
                value: to_value(&verdict),
            })
        }
        Command::Random { kind, n } => random_instance(*kind, *n, spec.seed, &tol),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn read_documents(inputs: &Inputs, expected: usize) -> Result<Vec<Value>, Failure> {
    let texts: Vec<String> = if inputs.inline.is_empty() {
        inputs
            .files
            .iter()
            .map(|p| std::fs::read_to_string(p).map_err(|e| Failure::parse(format!("{}: {e}", p.display()))))
            .collect::<Result<_, _>>()?
    } else {
        inputs.inline.clone()
    };
    if texts.len() != expected {
        return Err(Failure::parse(format!(
            "expected {expected} JSON document(s), found {}",
            texts.len()
        )));
    }
    texts
        .iter()
        .map(|t| serde_json::from_str(t).map_err(Failure::parse))
        .collect()
}

/// A matrix document, or the `field` of an object holding one.
fn read_matrix(doc: &Value, field: &str, tol: &Tolerances) -> Result<Isometry, Failure> {
    let v = match doc {
        Value::Object(map) => map
            .get(field)
            .ok_or_else(|| Failure::parse(format!("missing field \"{field}\"")))?,
        other => other,
    };
    let m = matrix_from_value(v).map_err(Failure::parse)?;
    let invalid = |mut report: Map<String, Value>| Failure {
        code: EXIT_INVALID_MATRIX,
        report: {
            report.insert("matrix".into(), Value::String(field.into()));
            Value::Object(report)
        },
    };
    if m.nrows() != m.ncols() || m.nrows() < 2 {
        let mut r = Map::new();
        r.insert(
            "error".into(),
            format!("expected a square matrix of size at least 2, found {}×{}", m.nrows(), m.ncols()).into(),
        );
        return Err(invalid(r));
    }
    Isometry::certify(m.clone(), tol.group).map_err(|e| {
        let (f, d) = su_residuals(&m);
        let mut r = Map::new();
        r.insert("error".into(), e.to_string().into());
        r.insert("formResidual".into(), json!(f));
        r.insert("detResidual".into(), json!(d));
        invalid(r)
    })
}

fn read_pair(doc: &Value, tol: &Tolerances) -> Result<LoxodromicPair, Failure> {
    if !doc.is_object() {
        return Err(Failure::parse("a pair must be an object with fields \"A\" and \"B\""));
    }
    let a = read_matrix(doc, "A", tol)?;
    let b = read_matrix(doc, "B", tol)?;
    make_pair_with(a, b, tol).map_err(|e| Failure::precondition(&e, None, tol))
}

fn pair_report(pair: &LoxodromicPair, mode: PairMode, seed: u64, tol: &Tolerances) -> crate::error::Result<Value> {
    let mut out = Map::new();
    let (tuple, convention) = match mode {
        PairMode::Reference => {
            let point = reference_eigenpoint_with(pair, seed, CollisionPolicy::Rephase, tol)?;
            out.insert("mode".into(), "reference".into());
            out.insert("labels".into(), to_value(&point.ordering.labels));
            out.insert("relabel".into(), to_value(&point.ordering.relabel));
            out.insert("rephased".into(), to_value(&point.ordering.rephased));
            (point.tuple, point.ordering.convention)
        }
        PairMode::Canonical => {
            let point = canonical_eigenpoint(pair)?;
            out.insert("mode".into(), "canonical".into());
            out.insert("labels".into(), to_value(&point.labels));
            out.insert("relabel".into(), to_value(&point.relabel));
            out.insert("constraintResidual".into(), json!(point.constraint_residual()));
            (point.tuple, point.convention)
        }
        PairMode::Nonsingular => {
            if !(pair.is_regular(tol)? && is_nonsingular_with(pair, tol)) {
                return Err(Error::NotNonsingular);
            }
            let point = normalize_nonsingular(pair)?;
            out.insert("mode".into(), "nonsingular".into());
            out.insert("labels".into(), to_value(&point.labels));
            out.insert("relabel".into(), to_value(&point.relabel));
            out.insert("orderA".into(), to_value(&point.order_a));
            out.insert("orderB".into(), to_value(&point.order_b));
            (point.tuple, pair.convention())
        }
        PairMode::GoodI => {
            let good = normalize_good_i(pair)?;
            out.insert("mode".into(), "goodI".into());
            out.insert("labels".into(), to_value(&good.point.ordering.labels));
            out.insert("relabel".into(), to_value(&good.point.ordering.relabel));
            out.insert("matching".into(), to_value(&good.matching));
            (good.point.tuple, AnchorConvention::AttractingRepelling)
        }
    };
    let points: Vec<_> = tuple.points().iter().map(|p| vector_to_wire(p.lift())).collect();
    out.insert("points".into(), to_value(&points));
    out.insert("profile".into(), to_value(&profile_of_tuple(pair, &tuple, convention, tol)?));
    Ok(Value::Object(out))
}

fn random_instance(kind: RandomKind, n: usize, seed: u64, tol: &Tolerances) -> Result<Success, Failure> {
    let mut rng = seeded_rng(seed);
    let fail = |e: &Error| Failure::precondition(e, None, tol);
    let mut out = Map::new();
    out.insert("n".into(), json!(n));
    out.insert("seed".into(), json!(seed));
    match kind {
        RandomKind::Element => {
            let a = random_loxodromic(n, &mut rng).map_err(|e| fail(&e))?.element;
            out.insert("kind".into(), "element".into());
            out.insert("matrix".into(), matrix_to_value(a.matrix()));
            out.insert("report".into(), to_value(&classify_report(&a, tol).map_err(|e| fail(&e))?));
        }
        RandomKind::Pair | RandomKind::NonsingularPair => {
            let want_nonsingular = kind == RandomKind::NonsingularPair;
            let mut last = Error::InvalidPair("no draws".into());
            let mut found = None;
            for _ in 0..MAX_DRAWS {
                let drawn = random_loxodromic(n, &mut rng).and_then(|a| {
                    let b = random_loxodromic(n, &mut rng)?;
                    let pair = make_pair_with(a.element, b.element, tol)?;
                    let flags = pair_flags(&pair, tol)?;
                    Ok((pair, flags))
                });
                match drawn {
                    Ok((pair, flags)) if !want_nonsingular || flags.non_singular => {
                        found = Some((pair, flags));
                        break;
                    }
                    Ok(_) => last = Error::NotNonsingular,
                    Err(e) => last = e,
                }
            }
            let (pair, flags) = found.ok_or_else(|| fail(&last))?;
            out.insert(
                "kind".into(),
                if want_nonsingular { "nonsingularPair" } else { "pair" }.into(),
            );
            out.insert("A".into(), matrix_to_value(pair.a().matrix()));
            out.insert("B".into(), matrix_to_value(pair.b().matrix()));
            out.insert("reportA".into(), to_value(&classify_report(pair.a(), tol).map_err(|e| fail(&e))?));
            out.insert("reportB".into(), to_value(&classify_report(pair.b(), tol).map_err(|e| fail(&e))?));
            out.insert("flags".into(), to_value(&flags));
        }
    }
    Ok(Value::Object(out).into())
}
