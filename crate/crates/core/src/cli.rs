//! Command-line front end: argument parsing, dispatch to the methods, and
//! rendering as JSON, CSV or aligned text.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::Integer;
use serde_json::{json, Value};

use crate::degree_line::{line_degrees, DegreeRecord};
use crate::error::{Error, Result};
use crate::genfun::{lambda_from_gf, pade_fit, stabilize, Stabilized};
use crate::patterns::{Pattern, PatternKind};
use crate::probe::{conjecture_check, estimate_lambda, probe, ProbeOptions, DEFAULT_BURN_IN};
use crate::recurrence::{
    balance_check, companion_has_quadratic_factor, conjecture_lambda, cs_prime_complexity, cs_prime_sequence,
    polynomial_growth, q9_closed_form_mismatches, q9_full_step_gf, q9_sequence, ExactSequences,
};
use crate::report::{compare_cs_prime, reproduce_tables, Budget, CellStatus, Scope, TablesReport, SCHEMA};
use crate::surface::{balance_violations, propagate, verify_lemma, verify_multiplicity_relations};

/// Seed used when neither `--seed` nor `ENTROPIK_SEED` is given.
pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Parser)]
#[command(name = "entropik", version, about = "Degree growth and algebraic entropy of matrix-inversion maps")]
pub struct Cli {
    /// random seed (default: ENTROPIK_SEED, else 1)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// output format
    #[arg(long = "out", value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// write to this file (atomically) instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_q(s: &str) -> std::result::Result<usize, String> {
    let q: usize = s.parse().map_err(|e| format!("{e}"))?;
    if q < 3 {
        return Err("q must be at least 3".into());
    }
    Ok(q)
}

fn parse_pattern(s: &str) -> std::result::Result<PatternKind, String> {
    match s.parse::<PatternKind>() {
        Ok(PatternKind::Custom) => Err("custom patterns are not available here".into()),
        Ok(k) => Ok(k),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DegreeMethod {
    Line,
    Surface,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GranularityArg {
    Full,
    Half,
}

#[derive(Debug, Args)]
pub struct DegreesArgs {
    #[arg(long, value_parser = parse_pattern, default_value = "cs")]
    pub pattern: PatternKind,
    #[arg(long, value_parser = parse_q)]
    pub q: usize,
    /// full steps of `K`
    #[arg(long, default_value_t = 8)]
    pub nmax: usize,
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    #[arg(long, value_enum, default_value = "line")]
    pub method: DegreeMethod,
    #[arg(long, value_enum, default_value = "full")]
    pub granularity: GranularityArg,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[arg(long, value_parser = parse_q)]
    pub q: usize,
    /// half steps
    #[arg(long, default_value_t = 8)]
    pub nmax: usize,
    /// also check the factorization identities at every step
    #[arg(long)]
    pub lemma: bool,
}

#[derive(Debug, Args)]
pub struct GenfunArgs {
    /// JSON written by `degrees` (or any object with a `degrees` array)
    #[arg(long, conflicts_with = "terms")]
    pub from: Option<PathBuf>,
    /// comma-separated full-step degrees
    #[arg(long, value_delimiter = ',')]
    pub terms: Option<Vec<String>>,
    /// fit only the first terms; the rest are held out
    #[arg(long)]
    pub window: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RecurrenceArgs {
    #[arg(long, value_parser = parse_q)]
    pub q: usize,
    /// half steps
    #[arg(long, default_value_t = 40)]
    pub nmax: usize,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long, value_parser = parse_pattern, default_value = "cs")]
    pub pattern: PatternKind,
    #[arg(long, value_parser = parse_q)]
    pub q: usize,
    #[arg(long, default_value_t = 5)]
    pub iters: usize,
    #[arg(long, default_value_t = 16)]
    pub entry_bits: u32,
    #[arg(long)]
    pub hadamard_first: bool,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    pub burn_in: usize,
    /// stop before an iteration would handle more bits than this
    #[arg(long, default_value_t = 1 << 31)]
    pub max_bits: u64,
}

#[derive(Debug, Args)]
pub struct ConjectureArgs {
    #[arg(long, value_parser = parse_q)]
    pub q: usize,
    #[arg(long, default_value_t = 4)]
    pub iters: usize,
    #[arg(long, default_value_t = 16)]
    pub entry_bits: u32,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 1 << 31)]
    pub max_bits: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// prime values of q for the cyclic symmetric pattern
    #[arg(long, value_delimiter = ',', default_value = "5,7")]
    pub q: Vec<usize>,
    /// full steps of the line method
    #[arg(long, default_value_t = 4)]
    pub line_nmax: usize,
    /// probe iterations (0 skips the probe)
    #[arg(long, default_value_t = 0)]
    pub probe_iters: usize,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// table1, table2, table3-analytic, table3-probe
    #[arg(long, value_delimiter = ',', default_value = "table1,table2,table3-analytic")]
    pub scope: Vec<String>,
    #[arg(long, default_value_t = Budget::default().line_nmax)]
    pub line_nmax: usize,
    #[arg(long, default_value_t = Budget::default().line_nmax_q7)]
    pub line_nmax_q7: usize,
    #[arg(long, default_value_t = 0)]
    pub probe_iters: usize,
    /// worker threads (default: available parallelism)
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// degree sequence of the iterates restricted to a generic line
    Degrees(DegreesArgs),
    /// surface propagation with content exponents (cyclic symmetric)
    Surface(SurfaceArgs),
    /// rational generating function of a degree sequence
    Genfun(GenfunArgs),
    /// exact sequences from the recurrence (cyclic symmetric, q prime or 9)
    Recurrence(RecurrenceArgs),
    /// growth of integer entries under iteration
    Probe(ProbeArgs),
    /// probe general, symmetric and cyclic patterns against the common value
    Conjecture(ConjectureArgs),
    /// cross-method validation for cyclic symmetric primes
    Verify(VerifyArgs),
    /// regenerate the reference tables
    Tables(TablesArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Degrees(_) => "degrees",
            Command::Surface(_) => "surface",
            Command::Genfun(_) => "genfun",
            Command::Recurrence(_) => "recurrence",
            Command::Probe(_) => "probe",
            Command::Conjecture(_) => "conjecture",
            Command::Verify(_) => "verify",
            Command::Tables(_) => "tables",
        }
    }
}

/// A rectangular block of text cells.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(title: impl Into<String>, header: &[&str]) -> Self {
        Table { title: title.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Computation(format!("csv: {e}"));
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Computation(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Computation(e.to_string()))
    }

    fn to_pretty(&self) -> String {
        let cols = self.header.len();
        let mut width = vec![0; cols];
        for r in std::iter::once(&self.header).chain(&self.rows) {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |r: &Vec<String>| {
            let cells: Vec<String> = r.iter().zip(&width).map(|(c, &w)| format!("{c:>w$}")).collect();
            cells.join("  ").trim_end().to_string() + "\n"
        };
        let mut s = String::new();
        if !self.title.is_empty() {
            s += &self.title;
            s += "\n";
        }
        s += &line(&self.header);
        s += &line(&width.iter().map(|&w| "-".repeat(w)).collect());
        for r in &self.rows {
            s += &line(r);
        }
        s
    }
}

/// What a command produced, and how it ended.
#[derive(Debug)]
pub struct Outcome {
    pub json: Value,
    pub csv: Table,
    pub pretty: Vec<Table>,
    /// set when the artifact is written but the run must exit nonzero
    pub failure: Option<Error>,
}

impl Outcome {
    fn ok(json: Value, table: Table) -> Self {
        Outcome { json, pretty: vec![table.clone()], csv: table, failure: None }
    }

    /// The artifact in the requested format, trailing newline included.
    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(&self.json)? + "\n",
            Format::Csv => self.csv.to_csv()?,
            Format::Pretty => self.pretty.iter().map(Table::to_pretty).collect::<Vec<_>>().join("\n"),
        })
    }
}

/// `--seed`, else `ENTROPIK_SEED`, else [`DEFAULT_SEED`].
pub fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("ENTROPIK_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Precondition(format!("ENTROPIK_SEED={v:?} is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn num(x: f64) -> String {
    format!("{x:.6}")
}

fn int_list(v: &[Integer]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn degrees(a: &DegreesArgs, seed: u64) -> Result<Outcome> {
    let pat = Pattern::build(a.q, a.pattern)?;
    let rec: DegreeRecord = match a.method {
        DegreeMethod::Line => line_degrees(&pat, a.nmax, a.trials, seed)?,
        DegreeMethod::Surface => propagate(&pat, 2 * a.nmax, seed)?.0,
    };
    let rec = match a.granularity {
        GranularityArg::Full => rec.full_step(),
        GranularityArg::Half => rec,
    };
    let json = json!({
        "pattern": rec.pattern,
        "q": rec.q,
        "granularity": rec.granularity,
        "method": rec.method,
        "n_max": a.nmax,
        "trials": a.trials,
        "degrees": rec.values,
        "flags": rec.flags,
    });
    let mut t = Table::new(format!("degrees, {} q = {}, {}", rec.pattern, rec.q, rec.method), &["n", "degree", "flagged"]);
    for (n, d) in rec.values.iter().enumerate() {
        t.push(vec![n.to_string(), d.to_string(), rec.flags.contains(&n).to_string()]);
    }
    Ok(Outcome::ok(json, t))
}

fn per_class(rows: &[Vec<u64>]) -> Value {
    let p = rows.first().map_or(0, Vec::len);
    let map: serde_json::Map<String, Value> =
        (0..p).map(|i| (i.to_string(), json!(rows.iter().map(|r| r[i]).collect::<Vec<_>>()))).collect();
    Value::Object(map)
}

fn surface(a: &SurfaceArgs, seed: u64) -> Result<Outcome> {
    let pat = Pattern::build(a.q, PatternKind::CyclicSymmetric)?;
    let (d, e) = propagate(&pat, a.nmax, seed)?;
    let balance = balance_violations(&d.values, &e);
    let mut checks = json!({ "balance": balance.is_empty(), "balance_violations": balance });
    if crate::algebra::field::is_prime_u64(a.q as u64) {
        let m = verify_multiplicity_relations(&e);
        checks["multiplicity_relations"] = json!(m);
    }
    if a.lemma {
        let l = verify_lemma(&pat, a.nmax, seed)?;
        checks["lemma"] = json!({ "all_passed": l.all_passed(), "steps": l.steps });
    }
    let json = json!({ "q": a.q, "p": e.p, "d": d.values, "u": per_class(&e.u), "v": per_class(&e.v), "checks": checks });
    let mut header = vec!["n".to_string(), "d".to_string()];
    header.extend((0..e.p).map(|i| format!("u{i}")));
    header.extend((0..e.p).map(|i| format!("v{i}")));
    let mut t = Table { title: format!("surface propagation, cs q = {}", a.q), header, rows: Vec::new() };
    for n in 0..d.values.len() {
        let mut r = vec![n.to_string(), d.values[n].to_string()];
        r.extend(e.u[n].iter().chain(&e.v[n]).map(u64::to_string));
        t.push(r);
    }
    Ok(Outcome::ok(json, t))
}

fn parse_terms(v: &[String]) -> Result<Vec<Integer>> {
    v.iter()
        .map(|s| s.trim().parse::<Integer>().map_err(|_| Error::Precondition(format!("not an integer: {s:?}"))))
        .collect()
}

/// Full-step degrees from a `degrees` artifact or a bare degree record.
pub fn terms_from_json(v: &Value) -> Result<Vec<Integer>> {
    let arr = v
        .get("degrees")
        .or_else(|| v.get("values"))
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Precondition("input has no `degrees` array".into()))?;
    let terms = arr
        .iter()
        .map(|x| match x {
            Value::Number(n) => n.as_u64().map(Integer::from),
            Value::String(s) => s.parse::<Integer>().ok(),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Precondition("degrees must be nonnegative integers".into()))?;
    let half = v.get("granularity").and_then(Value::as_str) == Some("half_step");
    Ok(if half { terms.into_iter().step_by(2).collect() } else { terms })
}

fn genfun(a: &GenfunArgs) -> Result<Outcome> {
    let terms = match (&a.from, &a.terms) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)?;
            terms_from_json(&serde_json::from_str(&text)?)?
        }
        (None, Some(t)) => parse_terms(t)?,
        (None, None) => return Err(Error::Precondition("give --from or --terms".into())),
    };
    let table = pade_fit(&terms, a.window)?;
    let mut t = Table::new("generating function", &["field", "value"]);
    let json = match stabilize(&table) {
        Stabilized::Stable { gf, splits_used } => {
            let lam = lambda_from_gf(&gf)?;
            t.push(vec!["numerator".into(), int_list(&gf.numerator)]);
            t.push(vec!["denominator".into(), int_list(&gf.denominator)]);
            t.push(vec!["lambda".into(), num(lam.estimate.lambda)]);
            t.push(vec!["growth_order".into(), lam.growth_order.map_or("-".into(), |g| g.to_string())]);
            t.push(vec!["splits_used".into(), format!("{splits_used:?}")]);
            let mut j = gf.to_json();
            j["stable"] = json!(true);
            j["lambda"] = json!(lam.estimate.lambda);
            j["estimate"] = json!(lam.estimate);
            j["from_root"] = json!(lam.from_root);
            j["from_ratio"] = json!(lam.from_ratio);
            j["estimators_agree"] = json!(lam.agree);
            j["growth_order"] = json!(lam.growth_order);
            j["splits_used"] = json!(splits_used);
            j["terms"] = json!(terms.len());
            j["window"] = json!(table.window);
            j
        }
        Stabilized::Unstable { diagnostics } => {
            t.push(vec!["stable".into(), "false".into()]);
            for d in &diagnostics {
                t.push(vec!["diagnostic".into(), d.clone()]);
            }
            json!({ "stable": false, "diagnostics": diagnostics, "terms": terms.len(), "window": table.window })
        }
    };
    Ok(Outcome::ok(json, t))
}

fn sequence_table(s: &ExactSequences, title: String) -> Table {
    let mut header = vec!["n".to_string(), "d".to_string()];
    header.extend((0..s.p).map(|i| format!("u{i}")));
    header.extend((0..s.p).map(|i| format!("v{i}")));
    let mut t = Table { title, header, rows: Vec::new() };
    for n in 0..s.len() {
        let mut r = vec![n.to_string(), s.d[n].to_string()];
        r.extend(s.u[n].iter().chain(&s.v[n]).map(Integer::to_string));
        t.push(r);
    }
    t
}

fn recurrence(a: &RecurrenceArgs) -> Result<Outcome> {
    let mut json;
    let s = if a.q == 9 {
        let s = q9_sequence(a.nmax)?;
        let (num, den) = q9_full_step_gf();
        let gf = crate::genfun::RationalGF::reduced(&num, &den)
            .ok_or_else(|| Error::Computation("degenerate generating function".into()))?;
        let lam = lambda_from_gf(&gf)?;
        json = json!({
            "lambda": lam.estimate.lambda,
            "estimate": lam.estimate,
            "generating_function": gf.to_json(),
            "closed_form_mismatches": q9_closed_form_mismatches(&s),
        });
        s
    } else {
        let s = cs_prime_sequence(a.q, a.nmax)?;
        let est = cs_prime_complexity(a.q)?;
        json = json!({
            "lambda": est.lambda,
            "estimate": est,
            "companion_has_quadratic_factor": companion_has_quadratic_factor(a.q)?,
        });
        if est.lambda == 1.0 {
            json["polynomial_growth"] = match polynomial_growth(&s.full_step()) {
                Ok(g) => json!(g),
                Err(e) => json!({ "error": e.to_string() }),
            };
        }
        s
    };
    json["sequences"] = s.to_json();
    json["q"] = json!(a.q);
    json["closure"] = json!(s.closure);
    json["balance_violations"] = json!(balance_check(&s));
    let mut title = format!("recurrence, cs q = {}, lambda = {}", a.q, num(json["lambda"].as_f64().unwrap_or(f64::NAN)));
    if let Some(c) = &s.closure {
        title += &format!(" ({c})");
    }
    let t = sequence_table(&s, title);
    Ok(Outcome::ok(json, t))
}

fn reference_lambda(kind: PatternKind, q: usize) -> Option<f64> {
    match kind {
        PatternKind::CyclicSymmetric => cs_prime_complexity(q).ok().map(|e| e.lambda),
        _ => conjecture_lambda(q).ok().map(|e| e.lambda),
    }
}

fn probe_cmd(a: &ProbeArgs, seed: u64) -> Result<Outcome> {
    let pat = Pattern::build(a.q, a.pattern)?;
    let opts = ProbeOptions { entry_bits: a.entry_bits, hadamard_first: a.hadamard_first, max_bits: a.max_bits, ..Default::default() };
    let trace = probe(&pat, a.iters, seed, &opts)?;
    let est = estimate_lambda(&trace.bits, a.burn_in);
    let failure = match (&trace.stopped, trace.iters_completed() < a.iters) {
        (Some(why), true) if why.starts_with("resource cap") => Some(Error::ResourceCap(why.clone())),
        (Some(why), true) => Some(Error::Computation(why.clone())),
        _ => None,
    };
    let (lambda, stderr) = match &est {
        Ok(e) => (json!(e.lambda), json!(e.uncertainty)),
        Err(_) => (Value::Null, Value::Null),
    };
    let json = json!({
        "pattern": trace.pattern,
        "q": trace.q,
        "p": trace.p,
        "entry_bits": trace.entry_bits,
        "hadamard_first": a.hadamard_first,
        "burn_in": a.burn_in,
        "bits": trace.bits,
        "lambda": lambda,
        "stderr": stderr,
        "iters_completed": trace.iters_completed(),
        "stopped": trace.stopped,
        "reference": reference_lambda(a.pattern, a.q),
        "estimate_error": est.as_ref().err().map(|e| e.to_string()),
    });
    let mut t = Table::new(format!("probe, {} q = {}", a.pattern, a.q), &["iteration", "bits"]);
    for (n, b) in trace.bits.iter().enumerate() {
        t.push(vec![n.to_string(), b.to_string()]);
    }
    let mut summary = Table::new("", &["lambda", "stderr", "reference"]);
    summary.push(vec![
        est.as_ref().map_or("-".into(), |e| num(e.lambda)),
        est.as_ref().map_or("-".into(), |e| num(e.uncertainty)),
        reference_lambda(a.pattern, a.q).map_or("-".into(), num),
    ]);
    Ok(Outcome { json, pretty: vec![t.clone(), summary], csv: t, failure })
}

fn conjecture(a: &ConjectureArgs, seed: u64) -> Result<Outcome> {
    let opts = ProbeOptions { entry_bits: a.entry_bits, max_bits: a.max_bits, ..Default::default() };
    let r = conjecture_check(a.q, a.iters, seed, a.burn_in, &opts)?;
    let mut t = Table::new(
        format!("conjecture check, q = {}, analytic lambda = {}", a.q, num(r.analytic.lambda)),
        &["pattern", "lambda", "uncertainty", "rel_deviation", "iters", "aborted"],
    );
    for row in &r.rows {
        t.push(vec![
            row.pattern.to_string(),
            row.lambda.as_ref().map_or("-".into(), |l| num(l.lambda)),
            row.lambda.as_ref().map_or("-".into(), |l| num(l.uncertainty)),
            row.rel_deviation.map_or("-".into(), |d| format!("{d:.5}")),
            row.iters_completed.to_string(),
            row.aborted.clone().unwrap_or_default(),
        ]);
    }
    Ok(Outcome::ok(json!(r), t))
}

fn verify(a: &VerifyArgs, seed: u64) -> Result<Outcome> {
    let mut comparisons = Vec::new();
    let mut t = Table::new("cross-method validation", &["q", "check", "passed"]);
    let mut failed = Vec::new();
    for &q in &a.q {
        let c = compare_cs_prime(q, a.line_nmax, a.probe_iters, seed)?;
        for (name, ok) in &c.checks {
            t.push(vec![q.to_string(), name.clone(), ok.to_string()]);
            if !ok {
                failed.push(format!("q = {q}: {name}"));
            }
        }
        for l in &c.lambdas {
            t.push(vec![q.to_string(), format!("lambda ({})", l.source), num(l.estimate.lambda)]);
        }
        comparisons.push(c);
    }
    let failure = (!failed.is_empty()).then(|| Error::GoldenMismatch(failed.join("; ")));
    Ok(Outcome { json: json!({ "comparisons": comparisons, "failed": failed }), pretty: vec![t.clone()], csv: t, failure })
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::Number(n) if n.is_f64() => n.as_f64().map_or(n.to_string(), num),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(cell_text).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

fn status_text(s: CellStatus) -> &'static str {
    match s {
        CellStatus::Match => "match",
        CellStatus::Mismatch => "MISMATCH",
        CellStatus::Skipped => "skipped",
        CellStatus::Reported => "reported",
        CellStatus::Conflict => "conflict",
    }
}

fn tables_pretty(r: &TablesReport) -> Vec<Table> {
    let mut t1 = Table::new("Table 1: generating functions, cyclic symmetric", &["q", "numerator", "denominator", "lambda", "status"]);
    let mut t2 = Table::new("Table 2: initial degrees and exponents (d, u0, u1)", &["q", "n=0", "n=1", "n=2", "n=3", "n=4", "status"]);
    let mut t3 = Table::new("Table 3: analytic complexity, cyclic", &["q", "cyclic", "reference", "cs prime", "status"]);
    let mut t3p = Table::new("Table 3: numerical complexity", &["cell", "lambda", "uncertainty", "reference"]);
    for c in &r.cells {
        let d = &c.detail;
        let q = c.key.trim_start_matches("q=").to_string();
        let st = status_text(c.status).to_string();
        match c.table {
            Scope::Table1 => t1.push(vec![q, cell_text(&d["numerator"]), cell_text(&d["denominator"]), cell_text(&d["lambda"]), st]),
            Scope::Table2 => {
                let mut row = vec![q];
                for n in 0..5 {
                    row.push(cell_text(&d["rows"][n]));
                }
                row.push(st);
                t2.push(row);
            }
            Scope::Table3Analytic => {
                t3.push(vec![q, cell_text(&d["cyclic"]), cell_text(&d["reference"]), cell_text(&d["cyclic_symmetric"]), st])
            }
            Scope::Table3Probe => {
                t3p.push(vec![c.key.clone(), cell_text(&d["lambda"]), cell_text(&d["uncertainty"]), cell_text(&d["reference"])])
            }
        }
    }
    [t1, t2, t3, t3p].into_iter().filter(|t| !t.rows.is_empty()).collect()
}

fn tables(a: &TablesArgs, seed: u64) -> Result<Outcome> {
    let mut scopes = a.scope.iter().map(|s| Scope::parse(s.trim())).collect::<Result<Vec<_>>>()?;
    scopes.sort();
    scopes.dedup();
    let budget = Budget { line_nmax: a.line_nmax, line_nmax_q7: a.line_nmax_q7, probe_iters: a.probe_iters };
    let jobs = a.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(Error::Precondition("--jobs must be at least 1".into()));
    }
    let r = reproduce_tables(&scopes, &budget, seed, jobs);
    let mut t = Table::new("", &["table", "cell", "status", "detail"]);
    for c in &r.cells {
        let table = serde_json::to_value(c.table)?.as_str().unwrap_or_default().to_string();
        t.push(vec![table, c.key.clone(), status_text(c.status).into(), c.detail.to_string()]);
    }
    let failure = (r.mismatches > 0).then(|| Error::GoldenMismatch(format!("{} cells differ from the reference", r.mismatches)));
    let json = json!({ "budget": budget, "scopes": scopes, "report": r });
    Ok(Outcome { json, pretty: tables_pretty(&r), csv: t, failure })
}

/// Runs one command; the JSON carries the schema version, command and seed.
pub fn execute(cmd: &Command, seed: u64) -> Result<Outcome> {
    let mut out = match cmd {
        Command::Degrees(a) => degrees(a, seed)?,
        Command::Surface(a) => surface(a, seed)?,
        Command::Genfun(a) => genfun(a)?,
        Command::Recurrence(a) => recurrence(a)?,
        Command::Probe(a) => probe_cmd(a, seed)?,
        Command::Conjecture(a) => conjecture(a, seed)?,
        Command::Verify(a) => verify(a, seed)?,
        Command::Tables(a) => tables(a, seed)?,
    };
    if let Value::Object(m) = &mut out.json {
        m.insert("schema".into(), json!(SCHEMA));
        m.insert("command".into(), json!(cmd.name()));
        m.insert("seed".into(), json!(seed));
    }
    let seed_col = out.csv.header.iter().any(|h| h == "seed");
    if !seed_col {
        out.csv.header.push("seed".into());
        for r in &mut out.csv.rows {
            r.push(seed.to_string());
        }
    }
    if let Some(first) = out.pretty.first_mut() {
        first.title = format!("{} (seed {seed})", first.title).trim_start().to_string();
    }
    Ok(out)
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Machine-readable error report.
pub fn error_json(kind: &str, message: &str, code: i32) -> String {
    json!({ "schema": SCHEMA, "error": { "kind": kind, "message": message, "exit_code": code } }).to_string()
}

/// Parses, runs and writes; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprintln!("{}", error_json("usage", e.to_string().trim(), 2));
            return 2;
        }
    };
    let fail = |e: &Error| {
        eprintln!("{}", error_json(e.kind(), &e.to_string(), e.exit_code()));
        e.exit_code()
    };
    let run = || -> Result<Option<Error>> {
        let seed = resolve_seed(cli.seed)?;
        let out = execute(&cli.command, seed)?;
        let text = out.render(cli.format)?;
        match &cli.output {
            Some(p) => write_atomic(p, &text)?,
            None => {
                let mut so = std::io::stdout().lock();
                so.write_all(text.as_bytes())?;
                so.flush()?;
            }
        }
        Ok(out.failure)
    };
    match run() {
        Ok(None) => 0,
        Ok(Some(e)) | Err(e) => fail(&e),
    }
}
