//! Command dispatch and reports.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use tftlab::bordism::{glue_family, Family};
use tftlab::bundle::{holonomy_with_rtol, parallel_transport_with_rtol, BundleData, COMPATIBILITY_TOLERANCE};
use tftlab::classify::{
    preflight, roundtrip, ReconstructionSettings, TftBackedOracle, TftOracle, DEFAULT_DEGREE, ROUNDTRIP_TOLERANCE,
};
use tftlab::numerics::{DenseMatrix, DEFAULT_RTOL};
use tftlab::tft::{evaluate_family, evaluate_with, EvalOptions, EvalResult, TftData};
use tftlab::verify::{run_all, SuiteConfig};
use tftlab::Error;

use crate::input::{read_document, Document, InputError, ParseOptions};

/// Agreement required between a glued family and its two presentations.
pub const GLUE_TOLERANCE: f64 = 1e-9;
/// Transports with `|det|` at or below this count as non-invertible.
pub const DETERMINANT_FLOOR: f64 = 1e-8;
/// Bordisms sampled by `classify`.
pub const ROUNDTRIP_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Transport,
    Holonomy,
    Evaluate,
    Verify,
    Classify,
    Glue,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub inputs: Vec<PathBuf>,
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub seed: u64,
    pub report: Option<PathBuf>,
    pub oriented: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            inputs: Vec::new(),
            tol: None,
            grid: None,
            seed: 0,
            report: None,
            oriented: false,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Integration { .. }
            | Error::Singular { .. }
            | Error::DivisionByZero { .. }
            | Error::NonFinite { .. }
            | Error::OutOfDomain { .. }
            | Error::Oracle(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// A human-readable body followed by sorted `key = value` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub body: String,
    pub values: BTreeMap<String, String>,
    pub passed: bool,
    /// Names the first failing check.
    pub failure: Option<String>,
}

impl Report {
    fn new() -> Self {
        Self {
            body: String::new(),
            values: BTreeMap::new(),
            passed: true,
            failure: None,
        }
    }

    fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.body.push_str(s.as_ref());
        self.body.push('\n');
    }

    fn fail(&mut self, what: impl Into<String>) {
        if self.passed {
            self.failure = Some(what.into());
        }
        self.passed = false;
    }

    pub fn exit_code(&self) -> u8 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.body)?;
        if !self.body.is_empty() {
            writeln!(f)?;
        }
        writeln!(f, "[summary]")?;
        for (k, v) in &self.values {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

fn sci(v: f64) -> String {
    format!("{v:.6e}")
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn matrix_block(r: &mut Report, title: &str, m: &DenseMatrix) {
    r.line(format!("{title} ({}x{})", m.rows(), m.cols()));
    r.body.push_str(&m.to_string());
}

fn load(cfg: &RunConfig) -> Result<Vec<Document>, CliError> {
    let opts = ParseOptions { grid: cfg.grid };
    cfg.inputs
        .iter()
        .map(|p| read_document(p, opts).map_err(CliError::from))
        .collect()
}

fn first_input<'d>(cfg: &RunConfig, docs: &'d [Document]) -> Result<&'d Document, CliError> {
    docs.first()
        .ok_or_else(|| CliError::Input(format!("`{}` needs an --input file", command_name(cfg.command))))
}

fn command_name(c: Command) -> &'static str {
    match c {
        Command::Transport => "transport",
        Command::Holonomy => "holonomy",
        Command::Evaluate => "evaluate",
        Command::Verify => "verify",
        Command::Classify => "classify",
        Command::Glue => "glue",
    }
}

fn bundle_of(doc: &Document) -> Result<&BundleData, CliError> {
    doc.bundle
        .as_ref()
        .ok_or_else(|| CliError::Input(format!("{}: a [bundle] section is required", doc.file)))
}

fn check_tol(cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.tol {
        Some(t) if !(t > 0.0 && t.is_finite()) => Err(CliError::Input(format!("--tol must be positive, got {t}"))),
        _ => Ok(()),
    }
}

/// Runs a command. `Err` carries input and numerical failures; failed
/// verifications come back as a report with `passed == false`.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    check_tol(cfg)?;
    if cfg.grid == Some(0) {
        return Err(CliError::Input("--grid must be at least 1".into()));
    }
    let docs = load(cfg)?;
    let mut report = match cfg.command {
        Command::Transport => transport(cfg, &docs)?,
        Command::Holonomy => holonomy(cfg, &docs)?,
        Command::Evaluate => evaluate(cfg, &docs)?,
        Command::Verify => verify(cfg, &docs)?,
        Command::Classify => classify(cfg, &docs)?,
        Command::Glue => glue(cfg, &docs)?,
    };
    report.set("command", command_name(cfg.command));
    report.set("verdict", verdict(report.passed));
    Ok(report)
}

fn transport(cfg: &RunConfig, docs: &[Document]) -> Result<Report, CliError> {
    let doc = first_input(cfg, docs)?;
    let bundle = bundle_of(doc)?;
    let entry = doc
        .paths
        .first()
        .ok_or_else(|| CliError::Input(format!("{}: a [path] section is required", doc.file)))?;
    let rtol = cfg.tol.unwrap_or(DEFAULT_RTOL);
    let (a, b) = entry.interval;
    let p = parallel_transport_with_rtol(bundle, &entry.path, a, b, rtol)?;
    let det = p.determinant();
    let mut r = Report::new();
    matrix_block(&mut r, &format!("transport over [{a}, {b}]"), &p);
    r.set("from", a);
    r.set("to", b);
    r.set("rtol", format!("{rtol:e}"));
    r.set("det", sci(det));
    r.set("invertible", verdict(det.abs() > DETERMINANT_FLOOR));
    if det.abs() <= DETERMINANT_FLOOR {
        r.fail(format!("invertibility: |det| = {:e}", det.abs()));
    }
    if let Ok(z) = TftData::new(bundle.clone()) {
        let (xa, xb) = (entry.path.point(a)?, entry.path.point(b)?);
        let ba = z.bundle().beta_at(&xa)?;
        let bb = z.bundle().beta_at(&xb)?;
        let drift = (&(&p.transpose() * &bb) * &p).distance(&ba);
        r.set("form.drift", sci(drift));
    }
    Ok(r)
}

fn holonomy(cfg: &RunConfig, docs: &[Document]) -> Result<Report, CliError> {
    let doc = first_input(cfg, docs)?;
    let bundle = bundle_of(doc)?;
    let entry = doc
        .paths
        .iter()
        .find(|p| p.path.period().is_some())
        .ok_or_else(|| CliError::Input(format!("{}: holonomy needs a [path] with a period", doc.file)))?;
    let rtol = cfg.tol.unwrap_or(DEFAULT_RTOL);
    let h = holonomy_with_rtol(bundle, &entry.path, rtol)?;
    let mut r = Report::new();
    matrix_block(&mut r, "holonomy", &h);
    r.set("period", entry.path.period().unwrap_or_default());
    r.set("rtol", format!("{rtol:e}"));
    r.set("trace", format!("{:.12}", h.trace()));
    r.set("det", sci(h.determinant()));
    Ok(r)
}

fn theory(cfg: &RunConfig, bundle: &BundleData) -> Result<TftData, CliError> {
    let tol = cfg.tol.unwrap_or(COMPATIBILITY_TOLERANCE);
    let z = if cfg.oriented {
        TftData::unchecked(bundle.clone(), tol)?
    } else {
        TftData::with_tolerance(bundle.clone(), tol)?
    };
    Ok(z)
}

fn describe(result: &EvalResult) -> String {
    let kinds = |v: &[tftlab::tft::FactorKind]| {
        if v.is_empty() {
            "R".to_string()
        } else {
            v.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ⊗ ")
        }
    };
    format!("{} -> {}", kinds(&result.domain), kinds(&result.codomain))
}

fn evaluate(cfg: &RunConfig, docs: &[Document]) -> Result<Report, CliError> {
    let doc = first_input(cfg, docs)?;
    let bundle = bundle_of(doc)?;
    let z = theory(cfg, bundle)?;
    let opts = EvalOptions {
        oriented: cfg.oriented,
        ..EvalOptions::default()
    };
    let mut r = Report::new();
    r.set("oriented", cfg.oriented);
    r.set("compatibility", verdict(z.is_compatible()));
    if let Some(family) = &doc.family {
        let values = evaluate_family(&z, family, opts)?;
        let scalar = values.fibers.iter().all(|(_, v)| v.is_scalar());
        r.line(format!(
            "{:>12} {:>24}  map",
            "s",
            if scalar { "value" } else { "frobenius" }
        ));
        for (s, v) in &values.fibers {
            let shown = v.scalar().unwrap_or_else(|| v.matrix.frobenius_norm());
            r.line(format!("{s:>12.6} {shown:>24.16e}  {}", describe(v)));
        }
        r.set("fibers", values.fibers.len());
        if let Some(sm) = values.smoothness() {
            r.set("smoothness", sci(sm));
        }
        return Ok(r);
    }
    let b = doc
        .bordism
        .as_ref()
        .ok_or_else(|| CliError::Input(format!("{}: evaluate needs [component] sections", doc.file)))?;
    let v = evaluate_with(&z, b, opts)?;
    matrix_block(&mut r, &describe(&v), &v.matrix);
    r.set("components", b.components.len());
    r.set("shape", format!("{}x{}", v.matrix.rows(), v.matrix.cols()));
    if let Some(x) = v.scalar() {
        r.set("value", format!("{x:.12}"));
    }
    Ok(r)
}

fn verify(cfg: &RunConfig, docs: &[Document]) -> Result<Report, CliError> {
    let suite = SuiteConfig {
        seed: cfg.seed,
        bundles: docs.iter().filter_map(|d| d.bundle.clone()).collect(),
    };
    let verdicts = run_all(&suite);
    let mut r = Report::new();
    for v in &verdicts {
        r.line(v.to_string());
        r.set(&format!("criterion.{:02}", v.id), verdict(v.passed()));
        if !v.passed() {
            r.fail(format!("criterion {} ({})", v.id, v.name));
        }
    }
    r.set("seed", cfg.seed);
    r.set("bundles", suite.bundles.len());
    r.set(
        "passed",
        format!("{}/{}", verdicts.iter().filter(|v| v.passed()).count(), verdicts.len()),
    );
    Ok(r)
}

fn classify(cfg: &RunConfig, docs: &[Document]) -> Result<Report, CliError> {
    let doc = first_input(cfg, docs)?;
    let bundle = bundle_of(doc)?;
    let oracle = if cfg.oriented {
        TftBackedOracle::oriented(TftData::unchecked(bundle.clone(), COMPATIBILITY_TOLERANCE)?)
    } else {
        TftBackedOracle::new(TftData::new(bundle.clone())?)
    };
    let mut r = Report::new();
    let pre = preflight(&oracle as &dyn TftOracle, cfg.seed)?;
    if !pre.passed() {
        r.body.push_str(&pre.to_string());
        r.set("preflight", "fail");
        r.fail(format!("preflight: {}", pre.violated().join(", ")));
        return Ok(r);
    }
    let settings = ReconstructionSettings {
        degree: cfg.grid.unwrap_or(DEFAULT_DEGREE),
        seed: cfg.seed,
        ..ReconstructionSettings::default()
    };
    let rec = roundtrip(&oracle, settings, ROUNDTRIP_SAMPLES)?;
    r.body.push_str(&pre.to_string());
    r.line("");
    r.body.push_str(&rec.report.table());
    for (k, v) in rec.report.summary() {
        r.set(&k, v);
    }
    let tol = cfg.tol.unwrap_or(ROUNDTRIP_TOLERANCE);
    r.set("roundtrip.tolerance", format!("{tol:e}"));
    if let Some(c) = &rec.report.compatibility {
        if !c.passed() {
            r.fail("compatibility of the reconstructed connection and form");
        }
    }
    match &rec.report.roundtrip {
        Some(rt) => {
            r.set("roundtrip", verdict(rt.max_deviation <= tol));
            if rt.max_deviation > tol {
                r.fail(format!("round trip: deviation {:e} exceeds {tol:e}", rt.max_deviation));
            }
        }
        None => r.fail("round trip was not run"),
    }
    Ok(r)
}

fn glue(cfg: &RunConfig, docs: &[Document]) -> Result<Report, CliError> {
    if docs.len() != 2 {
        return Err(CliError::Input(format!(
            "glue needs exactly two --input files, got {}",
            docs.len()
        )));
    }
    let (d1, d2) = (&docs[0], &docs[1]);
    let bundle = bundle_of(d1)?;
    let overlap = d1
        .overlap
        .as_ref()
        .or(d2.overlap.as_ref())
        .ok_or_else(|| CliError::Input("glue needs an [overlap] section in either input".into()))?;
    let family = |d: &Document| -> Result<Family, CliError> {
        d.family
            .clone()
            .ok_or_else(|| CliError::Input(format!("{}: glue needs [family] and [component] sections", d.file)))
    };
    let (f1, f2) = (family(d1)?, family(d2)?);
    let z = theory(cfg, bundle)?;
    let opts = EvalOptions {
        oriented: cfg.oriented,
        ..EvalOptions::default()
    };
    let glued = glue_family(&f1, &f2, overlap)?;
    let values = evaluate_family(&z, &glued, opts)?;
    let (e1, e2) = (evaluate_family(&z, &f1, opts)?, evaluate_family(&z, &f2, opts)?);
    let tol = cfg.tol.unwrap_or(GLUE_TOLERANCE);
    let mut r = Report::new();
    r.line(format!("{:>12} {:>14} {:>14}", "s", "vs chart 1", "vs chart 2"));
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for (s, v) in &values.fibers {
        let mut cells = Vec::new();
        for presentation in [&e1, &e2] {
            match presentation.fibers.iter().find(|(x, _)| (x - s).abs() <= 1e-12) {
                Some((_, w)) => {
                    let d = v.matrix.distance(&w.matrix);
                    worst = worst.max(d);
                    compared += 1;
                    cells.push(format!("{d:>14.3e}"));
                }
                None => cells.push(format!("{:>14}", "-")),
            }
        }
        r.line(format!("{s:>12.6} {}", cells.join(" ")));
    }
    r.set("fibers", values.fibers.len());
    r.set("comparisons", compared);
    r.set("deviation.max", sci(worst));
    r.set("tolerance", format!("{tol:e}"));
    if worst > tol {
        r.fail(format!("glued family deviates by {worst:e} from a presentation"));
    }
    Ok(r)
}
