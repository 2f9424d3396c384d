//! Description files.
//!
//! ```text
//! # comment
//! [bundle]
//! rank = 2
//! dim = 2
//! domain = [-2, 2] x [-2, 2]
//! omega(1, 2, 1) = -x2 / 2        # ω_μ entry (i, j), 1-based; missing entries are 0
//! beta(1, 1) = 1                  # without any beta line, β = I
//!
//! [path]
//! gamma(1) = cos(t)
//! gamma(2) = sin(t)
//! period = 6.283185307179586      # optional
//! interval = 0, 1                 # optional, for `transport`
//!
//! [component]                     # uses the closest [path] above it,
//! kind = standard                 # or its own gamma(mu) / period entries
//! cuts = 0, 0.5, 1                # standard: positions, may use s; brackets optional
//! interval = 0, 1                 # elbows: a, b (also accepted as `cuts`)
//! orientation = positive          # positive | negative | unoriented,
//!                                 # or `oriented = true | false`
//!
//! [family]
//! grid = 0, 1, 5                  # lo, hi, count
//!
//! [overlap]                       # for `glue`
//! transition = t + 0.02 * s
//! chi1 = (1 + cos(7.853981633974483 * (s - 0.8))) / 2
//! chi2 = ...                      # optional, defaults to 1 - chi1
//! ```
//!
//! Values are expressions in the grammar of [`parse_expr`]; numeric keys
//! accept any constant expression.

use std::cell::Cell;
use std::fmt;
use std::path::Path;

use tftlab::bordism::{Bordism, Component, Family, Orientation, Overlap};
use tftlab::bundle::{BundleData, DomainBox, PathData};
use tftlab::numerics::{parse_expr, Assignment, SmoothExpr, Var};

#[derive(Debug, Clone, PartialEq)]
pub struct InputError {
    pub file: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}: {}", self.file, self.message)
        } else {
            write!(f, "{}:{}:{}: {}", self.file, self.line, self.column, self.message)
        }
    }
}

impl std::error::Error for InputError {}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Overrides the point count of `[family] grid`.
    pub grid: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct PathEntry {
    pub path: PathData,
    pub interval: (f64, f64),
}

/// Everything a description file declares.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub file: String,
    pub bundle: Option<BundleData>,
    pub paths: Vec<PathEntry>,
    pub bordism: Option<Bordism>,
    /// Fiber values of `[family]`.
    pub grid: Option<Vec<f64>>,
    pub family: Option<Family>,
    pub overlap: Option<Overlap>,
}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    args: Vec<usize>,
    value: String,
    line: usize,
    /// 1-based column of the value.
    column: usize,
}

#[derive(Debug, Clone)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

const SECTIONS: [&str; 5] = ["bundle", "path", "component", "family", "overlap"];

struct Ctx<'a> {
    file: &'a str,
    /// Target dimension when the file declares a bundle.
    dim: Cell<Option<usize>>,
}

impl Ctx<'_> {
    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> InputError {
        InputError {
            file: self.file.to_string(),
            line,
            column,
            message: message.into(),
        }
    }

    fn at(&self, e: &Entry, message: impl Into<String>) -> InputError {
        self.err(e.line, e.column, message)
    }

    fn expr(&self, e: &Entry, src: &str, offset: usize) -> Result<SmoothExpr, InputError> {
        parse_expr(src).map_err(|p| {
            self.err(
                e.line,
                e.column + offset + p.column - 1,
                format!("expected {}, found {}", p.expected.join(" or "), p.found),
            )
        })
    }

    fn constant(&self, e: &Entry, src: &str, offset: usize) -> Result<f64, InputError> {
        let expr = self.expr(e, src, offset)?;
        if let Some(v) = expr.variables().first() {
            return Err(self.err(
                e.line,
                e.column + offset,
                format!("expected a constant, found variable `{v}`"),
            ));
        }
        expr.eval(&Assignment::new())
            .map_err(|err| self.err(e.line, e.column + offset, err.to_string()))
    }

    /// Comma-separated items with their offsets inside the value.
    fn items<'v>(&self, e: &'v Entry) -> Vec<(&'v str, usize)> {
        let mut out = Vec::new();
        let mut start = 0;
        for part in e.value.split(',') {
            let lead = part.len() - part.trim_start().len();
            out.push((part.trim(), start + lead));
            start += part.len() + 1;
        }
        out
    }

    fn constants(&self, e: &Entry) -> Result<Vec<f64>, InputError> {
        self.items(e)
            .into_iter()
            .map(|(s, off)| self.constant(e, s, off))
            .collect()
    }

    fn pair(&self, e: &Entry) -> Result<(f64, f64), InputError> {
        match self.constants(e)?[..] {
            [a, b] => Ok((a, b)),
            ref v => Err(self.at(e, format!("expected two values `a, b`, found {}", v.len()))),
        }
    }

    fn count(&self, e: &Entry, src: &str, offset: usize) -> Result<usize, InputError> {
        src.parse::<usize>().map_err(|_| {
            self.err(
                e.line,
                e.column + offset,
                format!("expected a nonnegative integer, found `{src}`"),
            )
        })
    }

    fn core(&self, line: usize, err: tftlab::Error) -> InputError {
        self.err(line, 1, err.to_string())
    }
}

fn split_sections(ctx: &Ctx, text: &str) -> Result<Vec<Section>, InputError> {
    let mut sections: Vec<Section> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ctx.err(line, indent + trimmed.len() + 1, "expected `]`"))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(ctx.err(
                    line,
                    indent + 2,
                    format!("unknown section `[{name}]`, expected one of {}", SECTIONS.join(", ")),
                ));
            }
            sections.push(Section {
                name: name.to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let eq = content
            .find('=')
            .ok_or_else(|| ctx.err(line, indent + trimmed.len() + 1, "expected `key = value`"))?;
        let section = sections
            .last_mut()
            .ok_or_else(|| ctx.err(line, indent + 1, "entry before the first section header"))?;
        let (key, args) = parse_key(ctx, line, &content[..eq])?;
        let value_raw = &content[eq + 1..];
        let lead = value_raw.len() - value_raw.trim_start().len();
        let value = value_raw.trim().to_string();
        if value.is_empty() {
            return Err(ctx.err(line, eq + 2, "expected a value after `=`"));
        }
        section.entries.push(Entry {
            key,
            args,
            value,
            line,
            column: eq + 2 + lead,
        });
    }
    Ok(sections)
}

fn parse_key(ctx: &Ctx, line: usize, raw: &str) -> Result<(String, Vec<usize>), InputError> {
    let indent = raw.len() - raw.trim_start().len();
    let key = raw.trim();
    let (name, args) = match key.find('(') {
        None => (key, None),
        Some(p) => {
            let inner = key[p + 1..]
                .strip_suffix(')')
                .ok_or_else(|| ctx.err(line, indent + key.len() + 1, "expected `)`"))?;
            (key[..p].trim(), Some(inner))
        }
    };
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(ctx.err(line, indent + 1, format!("expected a key name, found `{key}`")));
    }
    let args = match args {
        None => Vec::new(),
        Some(inner) => inner
            .split(',')
            .map(|a| {
                let a = a.trim();
                match a.parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v),
                    _ => Err(ctx.err(
                        line,
                        indent + 1,
                        format!("index `{a}` in `{key}` must be an integer ≥ 1"),
                    )),
                }
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    Ok((name.to_string(), args))
}

fn check_keys(ctx: &Ctx, s: &Section, allowed: &[(&str, usize)]) -> Result<(), InputError> {
    let mut seen: Vec<(&str, &[usize])> = Vec::new();
    for e in &s.entries {
        match allowed.iter().find(|(k, _)| *k == e.key) {
            None => {
                let names: Vec<&str> = allowed.iter().map(|(k, _)| *k).collect();
                return Err(ctx.err(
                    e.line,
                    1,
                    format!(
                        "unknown key `{}` in [{}], expected one of {}",
                        e.key,
                        s.name,
                        names.join(", ")
                    ),
                ));
            }
            Some((_, arity)) if *arity != e.args.len() => {
                return Err(ctx.err(
                    e.line,
                    1,
                    format!("`{}` takes {arity} indices, found {}", e.key, e.args.len()),
                ));
            }
            _ => {}
        }
        if seen.iter().any(|(k, a)| *k == e.key && *a == &e.args[..]) {
            return Err(ctx.err(e.line, 1, format!("duplicate key `{}`", e.key)));
        }
        seen.push((&e.key, &e.args));
    }
    Ok(())
}

fn find<'s>(s: &'s Section, key: &str) -> Option<&'s Entry> {
    s.entries.iter().find(|e| e.key == key)
}

fn parse_domain(ctx: &Ctx, e: &Entry) -> Result<DomainBox, InputError> {
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    let mut rest = e.value.as_str();
    let mut offset = 0;
    loop {
        let trimmed = rest.trim_start();
        offset += rest.len() - trimmed.len();
        let body = trimmed
            .strip_prefix('[')
            .ok_or_else(|| ctx.err(e.line, e.column + offset, "expected `[lo, hi]`"))?;
        let close = body
            .find(']')
            .ok_or_else(|| ctx.err(e.line, e.column + offset, "expected `]`"))?;
        let inner = Entry {
            value: body[..close].to_string(),
            column: e.column + offset + 1,
            ..e.clone()
        };
        let (a, b) = ctx.pair(&inner)?;
        lo.push(a);
        hi.push(b);
        offset += close + 2;
        rest = &body[close + 1..];
        let after = rest.trim_start();
        if after.is_empty() {
            break;
        }
        offset += rest.len() - after.len();
        rest = after
            .strip_prefix('x')
            .ok_or_else(|| ctx.err(e.line, e.column + offset, "expected `x` between intervals"))?;
        offset += 1;
    }
    DomainBox::new(lo, hi).map_err(|err| ctx.at(e, err.to_string()))
}

fn parse_bundle(ctx: &Ctx, s: &Section) -> Result<BundleData, InputError> {
    check_keys(
        ctx,
        s,
        &[("rank", 0), ("dim", 0), ("domain", 0), ("omega", 3), ("beta", 2)],
    )?;
    let required = |key: &str| find(s, key).ok_or_else(|| ctx.err(s.line, 1, format!("[bundle] needs `{key}`")));
    let rank_e = required("rank")?;
    let dim_e = required("dim")?;
    let rank = ctx.count(rank_e, &rank_e.value, 0)?;
    let dim = ctx.count(dim_e, &dim_e.value, 0)?;
    if rank == 0 || dim == 0 || dim > 9 {
        return Err(ctx.at(
            if rank == 0 { rank_e } else { dim_e },
            "rank must be ≥ 1 and dim in 1..9",
        ));
    }
    let domain = match find(s, "domain") {
        Some(e) => {
            let d = parse_domain(ctx, e)?;
            if d.dim() != dim {
                return Err(ctx.at(e, format!("domain has {} intervals, dim is {dim}", d.dim())));
            }
            d
        }
        None => DomainBox::cube(dim, 1.0),
    };
    let mut omega = vec![vec![vec![SmoothExpr::zero(); rank]; rank]; dim];
    let any_beta = s.entries.iter().any(|e| e.key == "beta");
    let mut beta: Vec<Vec<SmoothExpr>> = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| {
                    if !any_beta && i == j {
                        SmoothExpr::one()
                    } else {
                        SmoothExpr::zero()
                    }
                })
                .collect()
        })
        .collect();
    for e in &s.entries {
        let in_range = |v: usize, n: usize| v <= n;
        match e.key.as_str() {
            "omega" => {
                let (i, j, mu) = (e.args[0], e.args[1], e.args[2]);
                if !(in_range(i, rank) && in_range(j, rank) && in_range(mu, dim)) {
                    return Err(ctx.err(
                        e.line,
                        1,
                        format!("omega({i}, {j}, {mu}) is out of range for rank {rank}, dim {dim}"),
                    ));
                }
                omega[mu - 1][i - 1][j - 1] = ctx.expr(e, &e.value, 0)?;
            }
            "beta" => {
                let (i, j) = (e.args[0], e.args[1]);
                if !(in_range(i, rank) && in_range(j, rank)) {
                    return Err(ctx.err(e.line, 1, format!("beta({i}, {j}) is out of range for rank {rank}")));
                }
                beta[i - 1][j - 1] = ctx.expr(e, &e.value, 0)?;
            }
            _ => {}
        }
    }
    BundleData::new(rank, omega, beta, domain).map_err(|err| ctx.core(s.line, err))
}

fn parse_path(ctx: &Ctx, s: &Section, grid: &[f64]) -> Result<PathEntry, InputError> {
    check_keys(ctx, s, &[("gamma", 1), ("period", 0), ("interval", 0)])?;
    let mut comps: Vec<(usize, &Entry)> = s
        .entries
        .iter()
        .filter(|e| e.key == "gamma")
        .map(|e| (e.args[0], e))
        .collect();
    comps.sort_by_key(|(mu, _)| *mu);
    if comps.is_empty() {
        return Err(ctx.err(s.line, 1, "[path] needs gamma(1) .. gamma(m)"));
    }
    for (k, (mu, e)) in comps.iter().enumerate() {
        if *mu != k + 1 {
            return Err(ctx.err(
                e.line,
                1,
                format!("gamma components must be numbered 1..m, missing gamma({})", k + 1),
            ));
        }
    }
    let exprs = comps
        .iter()
        .map(|(_, e)| ctx.expr(e, &e.value, 0))
        .collect::<Result<Vec<_>, _>>()?;
    let mut path = PathData::new(exprs).map_err(|err| ctx.core(s.line, err))?;
    if let Some(e) = find(s, "period") {
        let period = ctx.constant(e, &e.value, 0)?;
        path = path
            .with_period(period, grid)
            .map_err(|err| ctx.at(e, err.to_string()))?;
    }
    let interval = match find(s, "interval") {
        Some(e) => ctx.pair(e)?,
        None => (0.0, 1.0),
    };
    Ok(PathEntry { path, interval })
}

/// `[a, b, ...]` or `a, b, ...`; the column moves past a stripped bracket.
fn unbracket(e: &Entry) -> Entry {
    match e.value.strip_prefix('[').and_then(|v| v.strip_suffix(']')) {
        Some(inner) => Entry {
            value: inner.to_string(),
            column: e.column + 1,
            ..e.clone()
        },
        None => e.clone(),
    }
}

fn parse_component(
    ctx: &Ctx,
    s: &Section,
    inherited: Option<&PathData>,
    grid: &[f64],
) -> Result<Component, InputError> {
    check_keys(
        ctx,
        s,
        &[
            ("kind", 0),
            ("cuts", 0),
            ("interval", 0),
            ("orientation", 0),
            ("oriented", 0),
            ("gamma", 1),
            ("period", 0),
        ],
    )?;
    let inline: Vec<Entry> = s
        .entries
        .iter()
        .filter(|e| e.key == "gamma" || e.key == "period")
        .cloned()
        .collect();
    let own;
    let path = if inline.iter().any(|e| e.key == "gamma") {
        let section = Section {
            name: "component".into(),
            line: s.line,
            entries: inline,
        };
        own = parse_path(ctx, &section, grid)?.path;
        &own
    } else if let Some(e) = find(s, "period") {
        return Err(ctx.err(e.line, 1, "`period` in [component] needs inline gamma(mu) entries"));
    } else {
        inherited.ok_or_else(|| {
            ctx.err(
                s.line,
                1,
                "[component] needs gamma(mu) entries or a [path] section above it",
            )
        })?
    };
    let kind = find(s, "kind").ok_or_else(|| ctx.err(s.line, 1, "[component] needs `kind`"))?;
    let forbid = |key: &str| match find(s, key) {
        Some(e) => Err(ctx.err(e.line, 1, format!("`{key}` does not apply to kind `{}`", kind.value))),
        None => Ok(()),
    };
    let component = match kind.value.as_str() {
        "standard" => {
            forbid("interval")?;
            let e = unbracket(find(s, "cuts").ok_or_else(|| ctx.err(s.line, 1, "kind `standard` needs `cuts`"))?);
            let taus = ctx
                .items(&e)
                .into_iter()
                .map(|(src, off)| ctx.expr(&e, src, off))
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(v) = taus.iter().flat_map(|t| t.variables()).find(|v| *v != Var::S) {
                return Err(ctx.at(&e, format!("cut positions may only use s, found `{v}`")));
            }
            let fixed: Option<Vec<f64>> = taus.iter().map(|t| t.as_const()).collect();
            match fixed {
                Some(values) => Component::standard(path.clone(), &values),
                None => Component::standard_family(path.clone(), taus, grid),
            }
            .map_err(|err| ctx.at(&e, err.to_string()))?
        }
        "right_elbow" | "left_elbow" => {
            let e = match (find(s, "interval"), find(s, "cuts")) {
                (Some(e), None) | (None, Some(e)) => unbracket(e),
                (Some(_), Some(e)) => {
                    return Err(ctx.err(e.line, 1, "give the elbow as `interval` or `cuts`, not both"))
                }
                (None, None) => {
                    return Err(ctx.err(s.line, 1, format!("kind `{}` needs `interval = a, b`", kind.value)))
                }
            };
            let (a, b) = ctx.pair(&e)?;
            let build = if kind.value == "right_elbow" {
                Component::right_elbow
            } else {
                Component::left_elbow
            };
            build(path.clone(), a, b).map_err(|err| ctx.core(e.line, err))?
        }
        "circle" => {
            forbid("cuts")?;
            forbid("interval")?;
            Component::circle(path.clone()).map_err(|err| ctx.core(kind.line, err))?
        }
        other => {
            return Err(ctx.at(
                kind,
                format!("unknown kind `{other}`, expected standard, right_elbow, left_elbow or circle"),
            ))
        }
    };
    let orientation = match (find(s, "orientation"), find(s, "oriented")) {
        (Some(_), Some(e)) => return Err(ctx.err(e.line, 1, "give `orientation` or `oriented`, not both")),
        (None, None) => Orientation::Unoriented,
        (None, Some(e)) => match e.value.as_str() {
            "true" => Orientation::Positive,
            "false" => Orientation::Unoriented,
            other => return Err(ctx.at(e, format!("expected true or false, found `{other}`"))),
        },
        (Some(e), None) => match e.value.as_str() {
            "positive" => Orientation::Positive,
            "negative" => Orientation::Negative,
            "unoriented" => Orientation::Unoriented,
            other => {
                return Err(ctx.at(
                    e,
                    format!("unknown orientation `{other}`, expected positive, negative or unoriented"),
                ))
            }
        },
    };
    if let Some(b) = ctx.dim.get() {
        if path.dim() != b {
            return Err(ctx.err(
                s.line,
                1,
                format!("path has {} components, bundle dim is {b}", path.dim()),
            ));
        }
    }
    Ok(component.with_orientation(orientation))
}

fn parse_family(ctx: &Ctx, s: &Section, opts: ParseOptions) -> Result<Vec<f64>, InputError> {
    check_keys(ctx, s, &[("grid", 0)])?;
    let e = find(s, "grid").ok_or_else(|| ctx.err(s.line, 1, "[family] needs `grid = lo, hi, count`"))?;
    let items = ctx.items(e);
    if items.len() != 3 {
        return Err(ctx.at(e, format!("expected `lo, hi, count`, found {} values", items.len())));
    }
    let lo = ctx.constant(e, items[0].0, items[0].1)?;
    let hi = ctx.constant(e, items[1].0, items[1].1)?;
    let count = match opts.grid {
        Some(n) => n,
        None => ctx.count(e, items[2].0, items[2].1)?,
    };
    if !(lo <= hi) || count == 0 {
        return Err(ctx.at(
            e,
            format!("family grid needs lo ≤ hi and count ≥ 1, got {lo}, {hi}, {count}"),
        ));
    }
    Ok(Family::grid(lo, hi, count))
}

fn parse_overlap(ctx: &Ctx, s: &Section) -> Result<Overlap, InputError> {
    check_keys(ctx, s, &[("transition", 0), ("chi1", 0), ("chi2", 0)])?;
    let need = |key: &str| {
        find(s, key)
            .ok_or_else(|| ctx.err(s.line, 1, format!("[overlap] needs `{key}`")))
            .and_then(|e| ctx.expr(e, &e.value, 0))
    };
    let transition = need("transition")?;
    let chi1 = need("chi1")?;
    let chi2 = match find(s, "chi2") {
        Some(e) => ctx.expr(e, &e.value, 0)?,
        None => SmoothExpr::one() - chi1.clone(),
    };
    Ok(Overlap { transition, chi1, chi2 })
}

/// Parses description text; `file` only labels diagnostics.
pub fn parse_document(file: &str, text: &str, opts: ParseOptions) -> Result<Document, InputError> {
    let ctx = Ctx {
        file,
        dim: Cell::new(None),
    };
    let sections = split_sections(&ctx, text)?;
    let single = |name: &str| -> Result<Option<&Section>, InputError> {
        let mut it = sections.iter().filter(|s| s.name == name);
        let first = it.next();
        if let Some(dup) = it.next() {
            return Err(ctx.err(dup.line, 1, format!("duplicate section [{name}]")));
        }
        Ok(first)
    };
    let mut doc = Document {
        file: file.to_string(),
        ..Document::default()
    };
    if let Some(s) = single("bundle")? {
        let b = parse_bundle(&ctx, s)?;
        ctx.dim.set(Some(b.dim()));
        doc.bundle = Some(b);
    }
    if let Some(s) = single("family")? {
        doc.grid = Some(parse_family(&ctx, s, opts)?);
    }
    if let Some(s) = single("overlap")? {
        doc.overlap = Some(parse_overlap(&ctx, s)?);
    }
    let grid = doc.grid.clone().unwrap_or_default();
    let mut components = Vec::new();
    let mut current: Option<PathData> = None;
    let mut first_component_line = None;
    for s in &sections {
        match s.name.as_str() {
            "path" => {
                let p = parse_path(&ctx, s, &grid)?;
                current = Some(p.path.clone());
                doc.paths.push(p);
            }
            "component" => {
                first_component_line.get_or_insert(s.line);
                components.push(parse_component(&ctx, s, current.as_ref(), &grid)?);
            }
            _ => {}
        }
    }
    if let Some(line) = first_component_line {
        let b = Bordism::unchecked(components).map_err(|err| ctx.core(line, err))?;
        if b.depends_on_s() && doc.grid.is_none() {
            return Err(ctx.err(line, 1, "components use s but there is no [family] section"));
        }
        match &doc.grid {
            Some(g) => {
                doc.family = Some(Family::from_bordism(&b, g).map_err(|err| ctx.core(line, err))?);
            }
            None => b.validate().map_err(|err| ctx.core(line, err))?,
        }
        doc.bordism = Some(b);
    }
    Ok(doc)
}

pub fn read_document(path: &Path, opts: ParseOptions) -> Result<Document, InputError> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| InputError {
        file: file.clone(),
        line: 0,
        column: 0,
        message: format!("cannot read file: {e}"),
    })?;
    parse_document(&file, &text, opts)
}
