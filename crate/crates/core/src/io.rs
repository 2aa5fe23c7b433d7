//! Problem files, the bundled example catalog, command dispatch and JSON reports.
//!
//! Rationals travel as `"p/q"` strings, complex numbers as `[re, im]`. Reports
//! are deterministic for a fixed seed unless `timing` is requested.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serializer;
use serde_json::{json, Map, Value};

use crate::cohomology::{verify_div_lemma, LinearForm, RestrictionTable};
use crate::continuation::{
    build_u_h, conifold_hypergeometric, crossing_rows, genericity_forms, inside_row, plus_slices, sample_ell, slice_check,
    theorem_row, theta_commutation, ConnectionFormula, ContinuationOptions, YSample,
};
use crate::error::{Error, Result};
use crate::fan::blowup_git;
use crate::git::{anticones, from_stacky_fan, minimal_anticones, s_set, to_stacky_fan, GitData, Side, WallCrossing};
use crate::ktheory::{fm_transform, lifts, pullback_consistent, verify_fm_diagram};
use crate::lattice::cokernel_with_projection;
use crate::linalg::QVec;
use crate::params::{Draws, EquivParams};
use crate::rat::{fmt, parse, to_f64, Int, Rat};
use crate::series::{h_function, i_function, verify_i_h_relation, Window};

pub const SCHEMA: u64 = 1;

pub fn ser_rat<S: Serializer>(x: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt(x))
}

pub fn ser_rat_vec<S: Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(fmt))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Base {
    Point,
    Table { h2_rank: usize, lambda: Vec<QVec>, j: Vec<JEntry> },
}

/// One coefficient of the base J-function: degree `D` and its `z`-coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct JEntry {
    pub d: QVec,
    pub z_coeffs: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Lambda {
    Symbolic,
    Values(Vec<Rat>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub y_degree: u32,
    pub z_low: i32,
    pub z_high: i32,
    pub q_degree: u32,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { y_degree: 2, z_low: -2, z_high: 1, q_degree: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub name: Option<String>,
    pub rank: usize,
    pub characters: Vec<Vec<Int>>,
    pub omega_plus: QVec,
    pub omega_minus: Option<QVec>,
    pub base: Base,
    pub lambda: Lambda,
    pub truncation: Truncation,
    pub seed: u64,
}

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::Validation { field: field.into(), message: message.into() }
}

/// Exact value of a JSON number or a `"p/q"` string. Decimal literals are read exactly.
fn rat_of(v: &Value, path: &str) -> Result<Rat> {
    match v {
        Value::String(s) => parse(s).ok_or_else(|| invalid(path, format!("`{s}` is not a rational"))),
        Value::Number(n) => decimal(&n.to_string()).ok_or_else(|| invalid(path, format!("`{n}` is not a finite decimal"))),
        _ => Err(invalid(path, "expected a number or a \"p/q\" string")),
    }
}

fn decimal(s: &str) -> Option<Rat> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    let digits: Int = format!("{int_part}{frac_part}").parse().ok()?;
    let shift = exp - frac_part.len() as i32;
    let ten = Rat::from_integer(10.into());
    Some(Rat::from_integer(digits) * crate::rat::pow(&ten, shift as i64))
}

fn int_of(v: &Value, path: &str) -> Result<Int> {
    let x = rat_of(v, path).map_err(|_| invalid(path, "expected an integer"))?;
    if !x.is_integer() {
        return Err(invalid(path, format!("expected an integer, found {}", fmt(&x))));
    }
    Ok(x.to_integer())
}

fn usize_of(v: &Value, path: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| invalid(path, "expected a non-negative integer"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| invalid(path, "expected an array"))
}

fn rat_vec(v: &Value, path: &str, len: usize) -> Result<QVec> {
    let a = array(v, path)?;
    if a.len() != len {
        return Err(invalid(path, format!("expected {len} entries, found {}", a.len())));
    }
    a.iter().enumerate().map(|(i, x)| rat_of(x, &format!("{path}[{i}]"))).collect()
}

fn object<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let o = v.as_object().ok_or_else(|| invalid(path, "expected an object"))?;
    if let Some(k) = o.keys().find(|k| !allowed.contains(&k.as_str())) {
        let at = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
        return Err(invalid(&at, "unknown field"));
    }
    Ok(o)
}

fn required<'a>(o: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    o.get(key).ok_or_else(|| invalid(&join(path, key), "missing field"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

impl ProblemFile {
    pub fn parse_str(text: &str) -> Result<ProblemFile> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<ProblemFile> {
        let o = object(
            v,
            "",
            &["schema", "name", "rank", "characters", "omega_plus", "omega_minus", "base", "lambda", "truncation", "seed"],
        )?;
        if let Some(s) = o.get("schema") {
            if s.as_u64() != Some(SCHEMA) {
                return Err(invalid("schema", format!("unsupported schema {s}, expected {SCHEMA}")));
            }
        }
        let name = match o.get("name") {
            None => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(invalid("name", "expected a string")),
        };
        let rank = usize_of(required(o, "rank", "")?, "rank")?;
        if rank == 0 {
            return Err(invalid("rank", "rank must be positive"));
        }
        let chars = array(required(o, "characters", "")?, "characters")?;
        if chars.is_empty() {
            return Err(invalid("characters", "empty character list"));
        }
        let mut characters = Vec::new();
        for (j, row) in chars.iter().enumerate() {
            let path = format!("characters[{j}]");
            let a = array(row, &path)?;
            if a.len() != rank {
                return Err(invalid(&path, format!("expected {rank} entries, found {}", a.len())));
            }
            characters.push(a.iter().enumerate().map(|(i, x)| int_of(x, &format!("{path}[{i}]"))).collect::<Result<Vec<_>>>()?);
        }
        let m = characters.len();
        let omega_plus = rat_vec(required(o, "omega_plus", "")?, "omega_plus", rank)?;
        let omega_minus = o.get("omega_minus").map(|v| rat_vec(v, "omega_minus", rank)).transpose()?;
        let base = match o.get("base") {
            None => Base::Point,
            Some(b) => parse_base(b, m)?,
        };
        let lambda = match o.get("lambda") {
            None => Lambda::Symbolic,
            Some(Value::String(s)) if s == "symbolic" => Lambda::Symbolic,
            Some(v @ Value::Array(_)) => Lambda::Values(rat_vec(v, "lambda", m)?),
            Some(_) => return Err(invalid("lambda", "expected \"symbolic\" or an array of m numbers")),
        };
        let truncation = match o.get("truncation") {
            None => Truncation::default(),
            Some(t) => parse_truncation(t)?,
        };
        let seed = match o.get("seed") {
            None => 1,
            Some(s) => s.as_u64().ok_or_else(|| invalid("seed", "expected a non-negative integer"))?,
        };
        let p = ProblemFile { name, rank, characters, omega_plus, omega_minus, base, lambda, truncation, seed };
        p.git()?;
        Ok(p)
    }

    pub fn h2_rank(&self) -> usize {
        match &self.base {
            Base::Point => 0,
            Base::Table { h2_rank, .. } => *h2_rank,
        }
    }

    pub fn git(&self) -> Result<GitData> {
        let lambda = match &self.base {
            Base::Point => Vec::new(),
            Base::Table { lambda, .. } => lambda.clone(),
        };
        GitData::with_base(self.characters.clone(), lambda, self.h2_rank())
    }

    pub fn side_plus(&self) -> Result<(GitData, Side)> {
        let git = self.git()?;
        let n = cokernel_with_projection(&git.d_matrix());
        let side = Side::new(&git, &self.omega_plus, &n)?;
        Ok((git, side))
    }

    pub fn has_wall(&self) -> bool {
        self.omega_minus.is_some()
    }

    pub fn wall_crossing(&self) -> Result<WallCrossing> {
        let minus = self.omega_minus.as_ref().ok_or_else(|| invalid("omega_minus", "this command needs a second chamber"))?;
        WallCrossing::new(self.git()?, &self.omega_plus, minus)
    }

    /// Base degrees to sum over: zero and the listed `J` degrees up to `Q_degree`.
    pub fn base_degrees(&self) -> Vec<QVec> {
        let h2 = self.h2_rank();
        let mut out = vec![vec![Rat::zero(); h2]];
        if let Base::Table { j, .. } = &self.base {
            for e in j {
                let total: Rat = e.d.iter().map(crate::rat::abs).sum();
                if total <= Rat::from_integer(self.truncation.q_degree.into()) && !out.contains(&e.d) {
                    out.push(e.d.clone());
                }
            }
        }
        out
    }

    pub fn to_value(&self) -> Value {
        let mut o = Map::new();
        o.insert("schema".into(), json!(SCHEMA));
        if let Some(n) = &self.name {
            o.insert("name".into(), json!(n));
        }
        o.insert("rank".into(), json!(self.rank));
        o.insert("characters".into(), json!(self.characters.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()));
        o.insert("omega_plus".into(), qv(&self.omega_plus));
        if let Some(w) = &self.omega_minus {
            o.insert("omega_minus".into(), qv(w));
        }
        o.insert(
            "base".into(),
            match &self.base {
                Base::Point => json!({"type": "point"}),
                Base::Table { h2_rank, lambda, j } => json!({
                    "type": "table",
                    "H2_rank": h2_rank,
                    "Lambda": lambda.iter().map(|r| qv(r)).collect::<Vec<_>>(),
                    "J": j.iter().map(|e| json!({"D": qv(&e.d), "z_coeffs": qv(&e.z_coeffs)})).collect::<Vec<_>>(),
                }),
            },
        );
        o.insert(
            "lambda".into(),
            match &self.lambda {
                Lambda::Symbolic => json!("symbolic"),
                Lambda::Values(v) => qv(v),
            },
        );
        let t = &self.truncation;
        o.insert("truncation".into(), json!({"y_degree": t.y_degree, "z_low": t.z_low, "z_high": t.z_high, "Q_degree": t.q_degree}));
        o.insert("seed".into(), json!(self.seed));
        Value::Object(o)
    }
}

fn parse_base(b: &Value, m: usize) -> Result<Base> {
    let o = object(b, "base", &["type", "H2_rank", "Lambda", "J"])?;
    match required(o, "type", "base")?.as_str() {
        Some("point") => {
            if o.len() > 1 {
                return Err(invalid("base", "a point base takes no further fields"));
            }
            Ok(Base::Point)
        }
        Some("table") => {
            let h2 = usize_of(required(o, "H2_rank", "base")?, "base.H2_rank")?;
            let rows = array(required(o, "Lambda", "base")?, "base.Lambda")?;
            if rows.len() != m {
                return Err(invalid("base.Lambda", format!("expected {m} rows, found {}", rows.len())));
            }
            let lambda = rows
                .iter()
                .enumerate()
                .map(|(j, r)| {
                    let path = format!("base.Lambda[{j}]");
                    let v = rat_vec(r, &path, h2)?;
                    if v.iter().any(|x| !x.is_integer()) {
                        return Err(invalid(&path, "degrees must be integers"));
                    }
                    Ok(v)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut j = Vec::new();
            if let Some(entries) = o.get("J") {
                for (k, e) in array(entries, "base.J")?.iter().enumerate() {
                    let path = format!("base.J[{k}]");
                    let eo = object(e, &path, &["D", "z_coeffs"])?;
                    let d = rat_vec(required(eo, "D", &path)?, &join(&path, "D"), h2)?;
                    let zc = array(required(eo, "z_coeffs", &path)?, &join(&path, "z_coeffs"))?;
                    let z_coeffs = zc.iter().enumerate().map(|(i, x)| rat_of(x, &format!("{path}.z_coeffs[{i}]"))).collect::<Result<_>>()?;
                    j.push(JEntry { d, z_coeffs });
                }
            }
            Ok(Base::Table { h2_rank: h2, lambda, j })
        }
        _ => Err(invalid("base.type", "expected \"point\" or \"table\"")),
    }
}

fn parse_truncation(t: &Value) -> Result<Truncation> {
    let o = object(t, "truncation", &["y_degree", "z_low", "z_high", "Q_degree"])?;
    let mut out = Truncation::default();
    let small = |key: &str| -> Result<Option<i64>> {
        o.get(key).map(|v| v.as_i64().ok_or_else(|| invalid(&join("truncation", key), "expected an integer"))).transpose()
    };
    if let Some(x) = small("y_degree")? {
        out.y_degree = u32::try_from(x).map_err(|_| invalid("truncation.y_degree", "must be non-negative"))?;
    }
    if let Some(x) = small("z_low")? {
        out.z_low = x as i32;
    }
    if let Some(x) = small("z_high")? {
        out.z_high = x as i32;
    }
    if let Some(x) = small("Q_degree")? {
        out.q_degree = u32::try_from(x).map_err(|_| invalid("truncation.Q_degree", "must be non-negative"))?;
    }
    if out.z_low > out.z_high {
        return Err(invalid("truncation", "z_low exceeds z_high"));
    }
    Ok(out)
}

const EXAMPLES: &[(&str, &str)] = &[
    ("p1", include_str!("../problems/p1.json")),
    ("flop", include_str!("../problems/flop.json")),
    ("c3z3", include_str!("../problems/c3z3.json")),
    ("gerbe", include_str!("../problems/gerbe.json")),
    ("rank2", include_str!("../problems/rank2.json")),
    ("noncrepant", include_str!("../problems/noncrepant.json")),
    ("flop_over_p1", include_str!("../problems/flop_over_p1.json")),
];

pub fn example_names() -> Vec<&'static str> {
    EXAMPLES.iter().map(|(n, _)| *n).collect()
}

pub fn example_text(name: &str) -> Option<&'static str> {
    let key = name.strip_suffix(".json").unwrap_or(name);
    EXAMPLES.iter().find(|(n, _)| *n == key).map(|(_, t)| *t)
}

pub fn example(name: &str) -> Result<ProblemFile> {
    ProblemFile::parse_str(example_text(name).ok_or_else(|| Error::Parse(format!("no bundled example `{name}`")))?)
}

/// Reads a problem from disk, falling back to the bundled catalog for bare names.
pub fn parse_problem(path: &str) -> Result<ProblemFile> {
    match std::fs::read_to_string(path) {
        Ok(text) => ProblemFile::parse_str(&text),
        Err(e) => match example_text(std::path::Path::new(path).file_name().and_then(|s| s.to_str()).unwrap_or(path)) {
            Some(text) if !std::path::Path::new(path).exists() => ProblemFile::parse_str(text),
            _ => Err(Error::Parse(format!("{path}: {e}"))),
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Chambers,
    Anticones,
    Wall,
    Boxes,
    Fan,
    Blowup,
    Restrictions,
    Hseries,
    Ifun,
    VerifyIh,
    Coeffs,
    MbVerify,
    Fm,
    VerifyFm,
    All,
}

impl Command {
    pub const ALL: [Command; 15] = [
        Command::Chambers,
        Command::Anticones,
        Command::Wall,
        Command::Boxes,
        Command::Fan,
        Command::Blowup,
        Command::Restrictions,
        Command::Hseries,
        Command::Ifun,
        Command::VerifyIh,
        Command::Coeffs,
        Command::MbVerify,
        Command::Fm,
        Command::VerifyFm,
        Command::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Chambers => "chambers",
            Command::Anticones => "anticones",
            Command::Wall => "wall",
            Command::Boxes => "boxes",
            Command::Fan => "fan",
            Command::Blowup => "blowup",
            Command::Restrictions => "restrictions",
            Command::Hseries => "hseries",
            Command::Ifun => "ifun",
            Command::VerifyIh => "verify-ih",
            Command::Coeffs => "coeffs",
            Command::MbVerify => "mb-verify",
            Command::Fm => "fm",
            Command::VerifyFm => "verify-fm",
            Command::All => "all",
        }
    }

    fn needs_wall(self) -> bool {
        matches!(self, Command::Wall | Command::Blowup | Command::Coeffs | Command::MbVerify | Command::Fm | Command::VerifyFm)
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Command> {
        Command::ALL.iter().copied().find(|c| c.name() == s).ok_or_else(|| Error::UnknownCommand(s.to_string()))
    }
}

/// Command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub tol: Option<f64>,
    pub draws: Option<usize>,
    /// Moduli `|y^e|` for the continuation checks.
    pub y: Vec<f64>,
    pub seed: Option<u64>,
    pub trunc_y: Option<u32>,
    pub trunc_z: Option<(i32, i32)>,
    pub parallel: bool,
    pub timing: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorInfo {
    pub code: String,
    pub message: String,
    pub hint: Option<String>,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        ErrorInfo { code: e.code().into(), message: e.to_string(), hint: e.hint().map(String::from) }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub problem: Option<Value>,
    pub seed: Option<u64>,
    pub tolerances: BTreeMap<String, f64>,
    pub results: Value,
    pub deviations: BTreeMap<String, f64>,
    pub pass: bool,
    pub error: Option<ErrorInfo>,
    pub runtime_ms: Option<u128>,
}

impl Report {
    pub fn failure(command: &str, problem: Option<&ProblemFile>, e: &Error) -> Report {
        Report {
            command: command.into(),
            problem: problem.map(ProblemFile::to_value),
            seed: problem.map(|p| p.seed),
            tolerances: BTreeMap::new(),
            results: Value::Null,
            deviations: BTreeMap::new(),
            pass: false,
            error: Some(e.into()),
            runtime_ms: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else if self.error.is_some() {
            2
        } else {
            1
        }
    }

    pub fn to_value(&self) -> Value {
        let mut o = Map::new();
        o.insert("schema".into(), json!(SCHEMA));
        o.insert("command".into(), json!(self.command));
        o.insert("problem".into(), self.problem.clone().unwrap_or(Value::Null));
        o.insert("seed".into(), json!(self.seed));
        o.insert("tolerances".into(), json!(self.tolerances));
        o.insert("results".into(), self.results.clone());
        o.insert("deviations".into(), json!(self.deviations));
        o.insert("pass".into(), json!(self.pass));
        if let Some(e) = &self.error {
            o.insert("error".into(), json!({"code": e.code, "message": e.message, "hint": e.hint}));
        }
        if let Some(t) = self.runtime_ms {
            o.insert("runtime_ms".into(), json!(t));
        }
        Value::Object(o)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// What a command produced before it is wrapped into a report.
#[derive(Default)]
struct Outcome {
    results: Value,
    tolerances: BTreeMap<String, f64>,
    deviations: BTreeMap<String, f64>,
    pass: bool,
}

impl Outcome {
    fn info(results: Value) -> Outcome {
        Outcome { results, pass: true, ..Default::default() }
    }
}

pub fn dispatch(command: &str, problem: &ProblemFile, flags: &Flags) -> Report {
    let start = Instant::now();
    let seed = flags.seed.unwrap_or(problem.seed);
    let outcome = command.parse::<Command>().and_then(|c| run(c, problem, flags, seed));
    let mut report = match outcome {
        Ok(o) => Report {
            command: command.into(),
            problem: Some(problem.to_value()),
            seed: Some(seed),
            tolerances: o.tolerances,
            results: o.results,
            deviations: o.deviations,
            pass: o.pass,
            error: None,
            runtime_ms: None,
        },
        Err(e) => {
            let mut r = Report::failure(command, Some(problem), &e);
            r.seed = Some(seed);
            r
        }
    };
    if flags.timing {
        report.runtime_ms = Some(start.elapsed().as_millis());
    }
    report
}

fn run(c: Command, p: &ProblemFile, flags: &Flags, seed: u64) -> Result<Outcome> {
    match c {
        Command::Chambers => chambers(p),
        Command::Anticones => anticone_report(p),
        Command::Wall => wall(p),
        Command::Boxes => boxes(p),
        Command::Fan => fan(p),
        Command::Blowup => blowup(p),
        Command::Restrictions => restrictions(p),
        Command::Hseries => hseries(p, flags, seed),
        Command::Ifun => ifun(p, flags),
        Command::VerifyIh => verify_ih(p, flags),
        Command::Coeffs => coeffs(p, seed),
        Command::MbVerify => mb_verify(p, flags, seed),
        Command::Fm => fm(p),
        Command::VerifyFm => verify_fm(p, flags, seed),
        Command::All => all(p, flags, seed),
    }
}

fn q(x: &Rat) -> Value {
    json!(fmt(x))
}

fn qv(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(q).collect())
}

fn cv(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn ints(v: &[Int]) -> Value {
    json!(v.iter().map(|x| x.to_string()).collect::<Vec<_>>())
}

fn labels(v: &[usize]) -> Value {
    json!(v.iter().map(|j| j + 1).collect::<Vec<_>>())
}

/// Sides present in the problem, `+` first.
fn sides(p: &ProblemFile) -> Result<(GitData, Vec<(&'static str, Side)>)> {
    let git = p.git()?;
    let n = cokernel_with_projection(&git.d_matrix());
    let mut out = vec![("plus", Side::new(&git, &p.omega_plus, &n)?)];
    if let Some(w) = &p.omega_minus {
        out.push(("minus", Side::new(&git, w, &n)?));
    }
    Ok((git, out))
}

fn chambers(p: &ProblemFile) -> Result<Outcome> {
    let (_, sides) = sides(p)?;
    let mut o = Map::new();
    for (name, s) in &sides {
        o.insert(
            (*name).into(),
            json!({
                "omega": qv(&s.omega),
                "normals": s.chamber.normals.iter().map(|n| qv(n)).collect::<Vec<_>>(),
                "rays": s.chamber.rays.iter().map(|r| qv(r)).collect::<Vec<_>>(),
                "minimal_anticones": s.minimal.iter().map(|a| json!(a.labels())).collect::<Vec<_>>(),
            }),
        );
    }
    Ok(Outcome::info(Value::Object(o)))
}

fn anticone_report(p: &ProblemFile) -> Result<Outcome> {
    let (git, sides) = sides(p)?;
    let mut o = Map::new();
    for (name, s) in &sides {
        o.insert(
            (*name).into(),
            json!({
                "anticones": s.anticones.iter().map(|a| json!(a.labels())).collect::<Vec<_>>(),
                "minimal": s.minimal.iter().map(|a| json!(a.labels())).collect::<Vec<_>>(),
                "extra_indices": labels(&s_set(git.m, &s.anticones)),
            }),
        );
    }
    Ok(Outcome::info(Value::Object(o)))
}

fn wall(p: &ProblemFile) -> Result<Outcome> {
    let wc = p.wall_crossing()?;
    let w = &wc.wall;
    let plus = |a: usize| json!(wc.plus.minimal[a].labels());
    let minus = |b: usize| json!(wc.minus.minimal[b].labels());
    let out = json!({
        "e": ints(&w.e),
        "w": w.w,
        "k": w.k,
        "l": w.l,
        "de": w.de,
        "conifold": q(&w.conifold),
        "j_plus": labels(&w.j_plus),
        "j_minus": labels(&w.j_minus),
        "j_wall": labels(&w.j_wall),
        "wall_basis": w.w_basis.iter().map(|b| ints(b)).collect::<Vec<_>>(),
        "omega0": qv(&w.omega0),
        "adapted_basis_plus": wc.basis_plus.p.iter().map(|r| qv(r)).collect::<Vec<_>>(),
        "adapted_basis_minus": wc.basis_minus.p.iter().map(|r| qv(r)).collect::<Vec<_>>(),
        "pairs": wc.pairs.iter().map(|pr| json!({
            "plus": plus(pr.plus), "minus": minus(pr.minus), "j_plus": pr.j_plus + 1, "j_minus": pr.j_minus + 1,
        })).collect::<Vec<_>>(),
        "class_pairs": wc.class_pairs.iter().map(|cp| json!({
            "plus": plus(cp.pair.plus),
            "f_plus": qv(&wc.plus.classes[cp.class_plus].f),
            "minus": minus(cp.pair.minus),
            "f_minus": qv(&cp.f_minus),
            "alpha": q(&cp.alpha),
        })).collect::<Vec<_>>(),
        "common": wc.common().iter().map(|(a, _)| plus(*a)).collect::<Vec<_>>(),
    });
    Ok(Outcome::info(out))
}

fn boxes(p: &ProblemFile) -> Result<Outcome> {
    let (git, sides) = sides(p)?;
    let n = cokernel_with_projection(&git.d_matrix());
    let mut o = Map::new();
    for (name, s) in &sides {
        let classes: Vec<Value> = s
            .classes
            .iter()
            .enumerate()
            .map(|(c, k)| {
                let at: Vec<Value> = s.fixed.iter().filter(|(_, cc)| *cc == c).map(|(a, _)| json!(s.minimal[*a].labels())).collect();
                json!({"f": qv(&k.f), "age": q(&k.age), "fixed_at": at})
            })
            .collect();
        o.insert((*name).into(), json!({"classes": classes}));
    }
    o.insert("torsion".into(), ints(&n.torsion));
    Ok(Outcome::info(Value::Object(o)))
}

fn fan(p: &ProblemFile) -> Result<Outcome> {
    let (_, sides) = sides(p)?;
    let mut o = Map::new();
    let mut pass = true;
    for (name, s) in &sides {
        let git = p.git()?;
        let esf = to_stacky_fan(&git, &s.anticones, &s.minimal)?;
        let (git2, omega2) = from_stacky_fan(&esf)?;
        let n2 = cokernel_with_projection(&git2.d_matrix());
        let back = Side::new(&git2, &omega2, &n2)?;
        let esf2 = to_stacky_fan(&git2, &back.anticones, &back.minimal)?;
        let round_trip = back.minimal == s.minimal && esf2.cones == esf.cones && esf2.s == esf.s && esf2.n.torsion == esf.n.torsion;
        pass &= round_trip;
        o.insert(
            (*name).into(),
            json!({
                "rays": esf.rays.iter().map(|r| ints(r)).collect::<Vec<_>>(),
                "images": esf.b.iter().map(|r| ints(r)).collect::<Vec<_>>(),
                "cones": esf.cones.iter().map(|c| labels(c)).collect::<Vec<_>>(),
                "extra_indices": labels(&esf.s),
                "torsion": ints(&esf.n.torsion),
                "round_trip": round_trip,
            }),
        );
    }
    Ok(Outcome { results: Value::Object(o), pass, ..Default::default() })
}

fn blowup(p: &ProblemFile) -> Result<Outcome> {
    let wc = p.wall_crossing()?;
    let (tilde, point) = blowup_git(&wc.git, &wc.wall)?;
    let min = minimal_anticones(&tilde, &anticones(&tilde, &point)?)?;
    let consistent = pullback_consistent(&wc.git, &wc.wall)?;
    let out = json!({
        "characters": tilde.d.iter().map(|r| ints(r)).collect::<Vec<_>>(),
        "stability": point.iter().map(|v| qv(v)).collect::<Vec<_>>(),
        "minimal_anticones": min.iter().map(|a| json!(a.labels())).collect::<Vec<_>>(),
        "pullbacks_consistent": consistent,
    });
    Ok(Outcome { results: out, pass: consistent, ..Default::default() })
}

/// The wall-adapted basis when the problem has a crepant wall, else the side's own dual basis.
fn side_basis(p: &ProblemFile, git: &GitData, plus: bool, side: &Side) -> Vec<QVec> {
    match p.wall_crossing() {
        Ok(wc) => wc.basis(plus).p.clone(),
        Err(_) => side.dual_basis(git.r),
    }
}

fn restrictions(p: &ProblemFile) -> Result<Outcome> {
    let (git, sides) = sides(p)?;
    let mut o = Map::new();
    for (name, s) in &sides {
        let basis = side_basis(p, &git, *name == "plus", s);
        let table = RestrictionTable::new(&git, &s.minimal, &basis)?;
        let rows: Vec<Value> = s
            .minimal
            .iter()
            .enumerate()
            .map(|(a, d)| {
                json!({
                    "anticone": d.labels(),
                    "u": table.u[a].iter().map(LinearForm::to_string).collect::<Vec<_>>(),
                    "rho": table.rho[a].to_string(),
                    "theta_basis": table.theta_basis[a].iter().map(LinearForm::to_string).collect::<Vec<_>>(),
                })
            })
            .collect();
        o.insert((*name).into(), Value::Array(rows));
    }
    let mut pass = true;
    if p.has_wall() {
        let wc = match p.wall_crossing() {
            Ok(wc) => wc,
            Err(e) => {
                o.insert("lemma".into(), json!({"skipped": e.code()}));
                return Ok(Outcome { results: Value::Object(o), pass, ..Default::default() });
            }
        };
        let checks = verify_div_lemma(&wc, &wc.basis_plus.p)?;
        let failures: Vec<Value> = checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| json!({"plus": c.plus, "minus": c.minus, "j": c.j.map(|j| j + 1), "lhs": c.lhs.to_string(), "rhs": c.rhs.to_string()}))
            .collect();
        pass = failures.is_empty();
        o.insert("lemma".into(), json!({"checks": checks.len(), "failures": failures}));
    }
    Ok(Outcome { results: Value::Object(o), pass, ..Default::default() })
}

/// Forms that must stay away from zero: `U_j(delta)` off `delta` at every minimal anticone.
fn side_forms(git: &GitData, sides: &[(&str, Side)]) -> Result<Vec<LinearForm>> {
    let mut forms = Vec::new();
    for (_, s) in sides {
        for d in &s.minimal {
            for j in (0..git.m).filter(|&j| !d.contains(j)) {
                forms.push(crate::cohomology::u_at(git, d, j)?);
            }
        }
    }
    Ok(forms)
}

const GAP: f64 = 2.0 * PI * 1e-4;

/// Explicit parameters from the problem, or a seeded generic draw.
fn params_for(p: &ProblemFile, forms: &[LinearForm], draws: &mut Draws) -> Result<EquivParams> {
    let m = p.characters.len();
    match &p.lambda {
        Lambda::Values(v) => {
            let h = draws.generic(0, p.h2_rank(), &[], 0.0).h;
            let params = EquivParams::new(v.clone(), h);
            if let Some(f) = forms.iter().find(|f| to_f64(&params.eval_rat(f)).abs() < GAP) {
                return Err(Error::NonGenericParameters(format!("{f} vanishes at the given lambda")));
            }
            Ok(params)
        }
        Lambda::Symbolic => Ok(draws.generic(m, p.h2_rank(), forms, GAP)),
    }
}

fn params_json(params: &EquivParams) -> Value {
    json!({"lambda": qv(&params.lambda), "h": qv(&params.h)})
}

fn hseries(p: &ProblemFile, flags: &Flags, seed: u64) -> Result<Outcome> {
    let (git, sides) = sides(p)?;
    let forms = side_forms(&git, &sides)?;
    let params = params_for(p, &forms, &mut Draws::new(seed))?;
    let weight = flags.trunc_y.unwrap_or(p.truncation.y_degree);
    let mut o = Map::new();
    for (name, s) in &sides {
        let basis = side_basis(p, &git, *name == "plus", s);
        let mut blocks = Vec::new();
        for big_d in p.base_degrees() {
            let h = h_function(&git, s, &basis, &params, &big_d, weight)?;
            let comps: Vec<Value> = h
                .components
                .iter()
                .map(|c| {
                    json!({
                        "class": qv(&s.classes[c.class].f),
                        "terms": c.terms.iter().map(|t| json!({
                            "d": qv(&t.d),
                            "exponent": qv(&basis.iter().map(|b| crate::rat::dot(b, &t.d)).collect::<Vec<_>>()),
                            "values": t.values.iter().map(|(a, v)| json!({"anticone": s.minimal[*a].labels(), "value": cv(*v)})).collect::<Vec<_>>(),
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            blocks.push(json!({"Q_degree": qv(&big_d), "components": comps}));
        }
        o.insert((*name).into(), json!({"basis": basis.iter().map(|b| qv(b)).collect::<Vec<_>>(), "series": blocks}));
    }
    o.insert("params".into(), params_json(&params));
    Ok(Outcome::info(Value::Object(o)))
}

fn window(p: &ProblemFile, flags: &Flags) -> Window {
    let (z_low, z_high) = flags.trunc_z.unwrap_or((p.truncation.z_low, p.truncation.z_high));
    Window { y_degree: flags.trunc_y.unwrap_or(p.truncation.y_degree), z_low, z_high }
}

fn ifun(p: &ProblemFile, flags: &Flags) -> Result<Outcome> {
    let (git, sides) = sides(p)?;
    let w = window(p, flags);
    let mut o = Map::new();
    for (name, s) in &sides {
        let basis = side_basis(p, &git, *name == "plus", s);
        let i = i_function(&git, s, &basis, &w)?;
        let comps: Vec<Value> = i
            .components
            .iter()
            .map(|c| json!({"anticone": c.delta.labels(), "class": qv(&s.classes[c.class].f), "series": c.series.to_string()}))
            .collect();
        o.insert((*name).into(), Value::Array(comps));
    }
    o.insert("window".into(), json!({"y_degree": w.y_degree, "z_low": w.z_low, "z_high": w.z_high}));
    Ok(Outcome::info(Value::Object(o)))
}

fn verify_ih(p: &ProblemFile, flags: &Flags) -> Result<Outcome> {
    let (git, sides) = sides(p)?;
    let w = window(p, flags);
    let mut o = Map::new();
    let mut pass = true;
    let mut compared = 0usize;
    for (name, s) in &sides {
        let basis = side_basis(p, &git, *name == "plus", s);
        let checks = verify_i_h_relation(&git, s, &basis, &w, None)?;
        pass &= checks.iter().all(|c| c.pass);
        compared += checks.iter().map(|c| c.lhs_terms).sum::<usize>();
        let rows: Vec<Value> = checks
            .iter()
            .map(|c| json!({"anticone": c.delta, "class": qv(&c.class), "lhs_terms": c.lhs_terms, "rhs_terms": c.rhs_terms, "residual": c.residual, "pass": c.pass}))
            .collect();
        o.insert((*name).into(), Value::Array(rows));
    }
    o.insert("window".into(), json!({"y_degree": w.y_degree, "z_low": w.z_low, "z_high": w.z_high}));
    o.insert("compared_terms".into(), json!(compared));
    Ok(Outcome { results: Value::Object(o), pass, ..Default::default() })
}

fn coeffs(p: &ProblemFile, seed: u64) -> Result<Outcome> {
    let wc = p.wall_crossing()?;
    let forms = genericity_forms(&wc)?;
    let params = params_for(p, &forms, &mut Draws::new(seed))?;
    let rows = wc
        .class_pairs
        .iter()
        .map(|cp| {
            let f = ConnectionFormula::from_pair(&wc, cp)?;
            Ok(json!({
                "plus": wc.plus.minimal[cp.pair.plus].labels(),
                "f_plus": qv(&wc.plus.classes[cp.class_plus].f),
                "minus": wc.minus.minimal[cp.pair.minus].labels(),
                "f_minus": qv(&cp.f_minus),
                "formula": f.to_string(),
                "value": cv(f.eval(&params, None)),
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let uh = build_u_h(&wc);
    let theta = theta_commutation(&wc, &uh)?;
    let pass = theta.iter().all(|t| t.mismatches == 0);
    let out = json!({
        "params": params_json(&params),
        "coefficients": rows,
        "u_h": {"rows": uh.rows, "cols": uh.cols, "entries": uh.entries.len()},
        "theta_commutation": theta.iter().map(|t| json!({"p": qv(&t.p), "entries": t.entries, "mismatches": t.mismatches})).collect::<Vec<_>>(),
    });
    Ok(Outcome { results: out, pass, ..Default::default() })
}

fn max_into(map: &mut BTreeMap<String, f64>, key: &str, v: f64) {
    let e = map.entry(key.into()).or_insert(0.0);
    *e = e.max(v);
}

fn mb_verify(p: &ProblemFile, flags: &Flags, seed: u64) -> Result<Outcome> {
    let wc = p.wall_crossing()?;
    let forms = genericity_forms(&wc)?;
    let params = params_for(p, &forms, &mut Draws::new(seed))?;
    let tol = flags.tol.unwrap_or(1e-6);
    let cnorm = to_f64(&wc.wall.conifold).abs();
    let samples: Vec<f64> = if flags.y.is_empty() { vec![1.5, 2.0, 4.0] } else { flags.y.clone() };
    let inside: Vec<f64> = [0.25, 0.5].iter().map(|t| t * cnorm).collect();
    let opts = ContinuationOptions::default();
    let mut dev = BTreeMap::new();
    let mut rows = Vec::new();
    if wc.git.r == 1 {
        let tasks: Vec<(usize, usize, f64)> =
            crossing_rows(&wc).into_iter().flat_map(|(a, c)| samples.iter().chain(&inside).map(move |&y| (a, c, y))).collect();
        let eval = |&(a, c, y): &(usize, usize, f64)| -> Result<(String, f64, Value)> {
            let sample = YSample::new(y);
            if y > cnorm {
                let row = theorem_row(&wc, &params, a, c, &sample, &opts)?;
                let mut v = json!({
                    "kind": "outside", "anticone": row.delta_plus, "class": qv(&row.class_plus), "y": y,
                    "mb": row.mb.map(cv), "residues": cv(row.residue), "minus_side": cv(row.rhs), "pairs": row.pairs, "deviation": row.deviation,
                });
                let mut worst = row.deviation;
                if let Ok(h) = conifold_hypergeometric(&wc, &params, a, &sample) {
                    let d = (h - row.rhs).norm() / row.rhs.norm().max(1.0);
                    v["hypergeometric"] = cv(h);
                    v["hypergeometric_deviation"] = json!(d);
                    worst = worst.max(d);
                }
                Ok(("theorem".into(), worst, v))
            } else {
                let row = inside_row(&wc, &params, a, c, &sample, &opts)?;
                let v = json!({
                    "kind": "inside", "anticone": row.delta_plus, "class": qv(&row.class_plus), "y": y,
                    "mb": cv(row.mb), "residues": cv(row.residue), "direct": cv(row.direct), "deviation": row.deviation,
                });
                Ok(("inside".into(), row.deviation, v))
            }
        };
        let results: Vec<Result<(String, f64, Value)>> =
            if flags.parallel { tasks.par_iter().map(eval).collect() } else { tasks.iter().map(eval).collect() };
        for r in results {
            let (k, d, v) = r?;
            max_into(&mut dev, &k, d);
            rows.push(v);
        }
    } else {
        // higher rank: per-slice identity at each sample outside the radius
        for &y in samples.iter().filter(|&&y| y > cnorm) {
            let ell = sample_ell(&wc, YSample::new(y).log_y(wc.wall.w), &[]);
            for pair in &wc.pairs {
                let dp = &wc.plus.minimal[pair.plus];
                for &(_, c) in wc.plus.fixed.iter().filter(|(a, _)| *a == pair.plus) {
                    for d in plus_slices(&wc.git, &wc.wall, dp, pair.j_plus, &wc.plus.classes[c].f, &[], opts.wall_shell) {
                        let chk = slice_check(&wc, &params, pair.plus, pair.j_plus, &d, &[], &ell, &opts)?;
                        max_into(&mut dev, "slices", chk.deviation);
                        rows.push(json!({
                            "kind": "slice", "anticone": dp.labels(), "j_minus_of_pair": pair.j_minus + 1, "y": y, "d_plus": qv(&chk.d_plus),
                            "mb": chk.mb.map(cv), "residues": cv(chk.residue), "minus_side": cv(chk.minus_side), "deviation": chk.deviation,
                        }));
                    }
                }
            }
        }
    }
    let pass = !rows.is_empty() && dev.values().all(|d| *d <= tol);
    let mut tolerances = BTreeMap::new();
    tolerances.insert("deviation".into(), tol);
    tolerances.insert("quadrature".into(), opts.quad_tol);
    let out = json!({
        "params": params_json(&params),
        "conifold_modulus": cnorm,
        "contour": "five-segment rectangle around the left pole families, adaptive Gauss-Kronrod 7-15",
        "branch": format!("arg y^e = {} pi", wc.wall.w),
        "rows": rows,
    });
    Ok(Outcome { results: out, tolerances, deviations: dev, pass })
}

fn fm(p: &ProblemFile) -> Result<Outcome> {
    let wc = p.wall_crossing()?;
    let mut rows = Vec::new();
    for (b, delta) in wc.minus.minimal.iter().enumerate() {
        for lift in lifts(&wc.git, delta) {
            let img = fm_transform(&wc, b, &lift)?;
            rows.push(json!({
                "anticone": delta.labels(), "lift": qv(&lift), "common": img.common, "image": img.expr.average_roots().to_string(),
            }));
        }
    }
    Ok(Outcome::info(json!({"images": rows})))
}

fn verify_fm(p: &ProblemFile, flags: &Flags, seed: u64) -> Result<Outcome> {
    let wc = p.wall_crossing()?;
    let forms = genericity_forms(&wc)?;
    let tol = flags.tol.unwrap_or(1e-9);
    let n = match p.lambda {
        Lambda::Values(_) => 1,
        Lambda::Symbolic => flags.draws.unwrap_or(20).max(1),
    };
    let mut draws = Draws::new(seed);
    let all_params = (0..n).map(|_| params_for(p, &forms, &mut draws)).collect::<Result<Vec<_>>>()?;
    let run = |params: &EquivParams| verify_fm_diagram(&wc, params, None);
    let reports: Vec<_> = if flags.parallel { all_params.par_iter().map(run).collect() } else { all_params.iter().map(run).collect() };
    let mut dev = BTreeMap::new();
    let mut exact = true;
    let mut summary = Vec::new();
    for (params, rep) in all_params.iter().zip(reports) {
        let rep = rep?;
        for r in &rep.rows {
            max_into(&mut dev, "diagram", r.deviation);
            max_into(&mut dev, "support", r.support_max);
            if let Some(x) = r.prefactor_max {
                max_into(&mut dev, "prefactor", x);
            }
            exact &= r.support_exact && r.matched_exact.unwrap_or(true) && r.fixed_part.unwrap_or(true);
        }
        summary.push(json!({"params": params_json(params), "max_deviation": rep.max_deviation}));
    }
    let first = verify_fm_diagram(&wc, &all_params[0], None)?;
    let rows: Vec<Value> = first
        .rows
        .iter()
        .map(|r| {
            json!({
                "anticone": r.delta_minus, "lift": qv(&r.lift), "common": r.common, "image": r.image, "deviation": r.deviation,
                "support_exact": r.support_exact, "matched_exact": r.matched_exact, "fixed_part": r.fixed_part,
            })
        })
        .collect();
    let consistent = pullback_consistent(&wc.git, &wc.wall)?;
    let pass = exact && consistent && dev.get("diagram").copied().unwrap_or(0.0) < tol && dev.get("support").copied().unwrap_or(0.0) < 1e-12;
    let mut tolerances = BTreeMap::new();
    tolerances.insert("diagram".into(), tol);
    tolerances.insert("support".into(), 1e-12);
    Ok(Outcome {
        results: json!({"draws": summary, "rows": rows, "pullbacks_consistent": consistent, "exact_checks": exact}),
        tolerances,
        deviations: dev,
        pass,
    })
}

fn all(p: &ProblemFile, flags: &Flags, seed: u64) -> Result<Outcome> {
    let mut o = Map::new();
    let mut pass = true;
    let mut dev = BTreeMap::new();
    let mut tolerances = BTreeMap::new();
    for c in Command::ALL.iter().copied().filter(|c| *c != Command::All) {
        if c.needs_wall() && !p.has_wall() {
            continue;
        }
        if matches!(c, Command::Ifun | Command::VerifyIh) && p.h2_rank() > 0 {
            continue;
        }
        let out = run(c, p, flags, seed);
        let entry = match out {
            Ok(x) => {
                pass &= x.pass;
                for (k, v) in x.deviations {
                    max_into(&mut dev, &format!("{}.{k}", c.name()), v);
                }
                for (k, v) in x.tolerances {
                    tolerances.insert(format!("{}.{k}", c.name()), v);
                }
                json!({"pass": x.pass})
            }
            Err(e) => {
                pass = false;
                json!({"pass": false, "error": {"code": e.code(), "message": e.to_string()}})
            }
        };
        o.insert(c.name().into(), entry);
    }
    Ok(Outcome { results: Value::Object(o), tolerances, deviations: dev, pass })
}

/// One line per row of a report, for terminal output.
pub fn summary_line(r: &Report) -> String {
    let mut s = format!("{}: {}", r.command, if r.pass { "pass" } else { "FAIL" });
    for (k, v) in &r.deviations {
        let _ = write!(s, " {k}={v:.3e}");
    }
    if let Some(e) = &r.error {
        let _ = write!(s, " [{}] {}", e.code, e.message);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;

    #[test]
    fn bundled_flop_parses() {
        let p = example("flop").unwrap();
        let git = p.git().unwrap();
        assert_eq!((git.r, git.m), (1, 4));
        assert_eq!(git.d.iter().map(|r| crate::rat::to_i64(&r[0])).collect::<Vec<_>>(), vec![1, 1, -1, -1]);
        for name in example_names() {
            let p = example(name).unwrap();
            assert_eq!(ProblemFile::from_value(&p.to_value()).unwrap(), p, "{name}");
        }
    }

    #[test]
    fn non_integer_character_is_rejected() {
        let text = r#"{"rank": 1, "characters": [[1], [0.5], [-1], [-1]], "omega_plus": [1]}"#;
        match ProblemFile::parse_str(text) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "characters[1][0]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn field_paths_and_parse_positions() {
        let text = r#"{"rank": 1, "characters": [[1], [1]], "omega_plus": [1], "truncation": {"y_degre": 2}}"#;
        assert!(matches!(ProblemFile::parse_str(text), Err(Error::Validation { field, .. }) if field == "truncation.y_degre"));
        let text = r#"{"rank": 1, "characters": [[1], [1]], "omega_plus": [1, 2]}"#;
        assert!(matches!(ProblemFile::parse_str(text), Err(Error::Validation { field, .. }) if field == "omega_plus"));
        let text = "{\"rank\": 1,\n \"characters\": [[1] [1]]}";
        match ProblemFile::parse_str(text) {
            Err(Error::Parse(m)) => assert!(m.starts_with("line 2"), "{m}"),
            other => panic!("{other:?}"),
        }
        let text = r#"{"schema": 2, "rank": 1, "characters": [[1], [1]], "omega_plus": [1]}"#;
        assert!(matches!(ProblemFile::parse_str(text), Err(Error::Validation { field, .. }) if field == "schema"));
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(decimal("0.25"), Some(crate::rat::rat(1, 4)));
        assert_eq!(decimal("-1.5e2"), Some(rat_int(-150)));
        assert_eq!(decimal("3"), Some(rat_int(3)));
        let text = r#"{"rank": 1, "characters": [[1], [1]], "omega_plus": ["3/4"]}"#;
        assert_eq!(ProblemFile::parse_str(text).unwrap().omega_plus, vec![crate::rat::rat(3, 4)]);
    }

    #[test]
    fn omega_on_the_wall_reports_a_hint() {
        let text = r#"{"rank": 1, "characters": [[1], [1], [-1], [-1]], "omega_plus": [0], "omega_minus": [-1]}"#;
        let p = ProblemFile::parse_str(text).unwrap();
        let r = dispatch("chambers", &p, &Flags::default());
        let e = r.error.clone().unwrap();
        assert_eq!(e.code, "degenerate_stability");
        assert!(e.hint.is_some());
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn wall_block_for_flop() {
        let r = dispatch("wall", &example("flop").unwrap(), &Flags::default());
        assert!(r.pass);
        assert_eq!(r.results["e"], json!(["1"]));
        assert_eq!(r.results["w"], json!(1));
        assert_eq!(r.results["k"], json!([1, 1, 0, 0]));
        assert_eq!(r.results["conifold"], json!("1"));
    }

    #[test]
    fn unknown_command_and_missing_wall() {
        let p = example("p1").unwrap();
        assert_eq!(dispatch("frobnicate", &p, &Flags::default()).error.unwrap().code, "unknown_command");
        assert_eq!(dispatch("wall", &p, &Flags::default()).error.unwrap().code, "validation_error");
        assert_eq!(dispatch("wall", &example("noncrepant").unwrap(), &Flags::default()).error.unwrap().code, "not_crepant");
    }

    #[test]
    fn reports_are_deterministic() {
        let p = example("c3z3").unwrap();
        let flags = Flags { draws: Some(2), ..Flags::default() };
        let a = dispatch("verify-fm", &p, &flags).to_json();
        let b = dispatch("verify-fm", &p, &flags).to_json();
        assert_eq!(a, b);
        let par = dispatch("verify-fm", &p, &Flags { parallel: true, ..flags }).to_json();
        assert_eq!(a, par);
    }
}
