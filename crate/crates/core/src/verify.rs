//! Property suites backing the acceptance checks and the `verify` command.
//!
//! Each suite draws its cases from a seed of its own, so suites can run
//! alone or together with identical results.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bordism::{
    build_modification, glue_family, insert_sitting_instants, simplicial_map, standard_bump, standard_two_sided,
    Bordism, Component, Family, ModificationKind, Overlap,
};
use crate::bundle::random::{
    random_bundle, random_compatible_bundle, random_increasing_reparametrization, random_loop, random_path,
    random_symmetric_form,
};
use crate::bundle::{
    check_compatibility, cut_rescale, parallel_transport, parallel_transport_with_rtol, Affine, BundleData, DomainBox,
    PathData,
};
use crate::classify::{
    convergence_study, preflight, roundtrip, CompositionBugOracle, ReconstructionSettings, TftBackedOracle, TftOracle,
    ZeroTransportOracle, INVERTIBILITY, MULTIPLICATIVITY,
};
use crate::error::Result;
use crate::numerics::{Assignment, DenseMatrix, SmoothExpr};
use crate::tft::{
    elbow_midpoint_invariance, evaluate, evaluate_family, snake_check, snake_check_oriented, swap_elbow, swap_matrix,
    EvalOptions, Primitives, TftData,
};

/// The acceptance criteria, in order.
pub const CRITERIA: [&str; 12] = [
    "transport multiplicativity",
    "constant paths give the identity",
    "reparametrization invariance",
    "modification independence",
    "snake identity",
    "circle values",
    "elbow swap symmetry",
    "connection reconstruction",
    "round-trip classification",
    "thin bordisms and composition",
    "family gluing",
    "negative controls",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within(f64, f64),
}

impl Bound {
    pub fn holds(self, v: f64) -> bool {
        match self {
            Bound::AtMost(b) => v <= b,
            Bound::AtLeast(b) => v >= b,
            Bound::Within(lo, hi) => lo <= v && v <= hi,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::AtMost(b) => write!(f, "<= {b:e}"),
            Bound::AtLeast(b) => write!(f, ">= {b:e}"),
            Bound::Within(lo, hi) => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

/// One measured quantity against its bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub bound: Bound,
}

impl Check {
    pub fn new(label: impl Into<String>, value: f64, bound: Bound) -> Self {
        Self {
            label: label.into(),
            value,
            bound,
        }
    }

    pub fn passed(&self) -> bool {
        self.bound.holds(self.value)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:.3e} {}", self.label, self.value, self.bound)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub id: usize,
    pub name: &'static str,
    pub checks: Vec<Check>,
    /// Set when the suite could not run to completion.
    pub error: Option<String>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:>2} {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.name
        )?;
        let parts: Vec<String> = self.checks.iter().map(|c| c.to_string()).collect();
        if !parts.is_empty() {
            write!(f, ": {}", parts.join("; "))?;
        }
        if let Some(e) = &self.error {
            write!(f, ": error: {e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Bundles checked in addition to the random ones by the suites that
    /// take arbitrary bundles (1, 2, 5, 6).
    pub bundles: Vec<BundleData>,
}

/// Runs criterion `id` (1-based).
pub fn run_criterion(id: usize, cfg: &SuiteConfig) -> Verdict {
    let name = CRITERIA.get(id.wrapping_sub(1)).copied().unwrap_or("unknown criterion");
    let outcome = match id {
        1 => multiplicativity(cfg),
        2 => constant_paths(cfg),
        3 => reparametrization(cfg),
        4 => modification_independence(cfg),
        5 => snake(cfg),
        6 => circles(cfg),
        7 => elbow_swap(cfg),
        8 => connection_reconstruction(cfg),
        9 => round_trip(cfg),
        10 => thin_and_segal(cfg),
        11 => family_gluing(cfg),
        12 => negative_controls(cfg),
        _ => Err(crate::Error::Precondition(format!("no criterion {id}"))),
    };
    match outcome {
        Ok(checks) => Verdict {
            id,
            name,
            checks,
            error: None,
        },
        Err(e) => Verdict {
            id,
            name,
            checks: Vec::new(),
            error: Some(e.to_string()),
        },
    }
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<Verdict> {
    (1..=CRITERIA.len()).map(|id| run_criterion(id, cfg)).collect()
}

fn rng_for(cfg: &SuiteConfig, id: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(1000).wrapping_add(id))
}

fn random_point<R: Rng>(rng: &mut R, d: &DomainBox) -> Vec<f64> {
    (0..d.dim()).map(|i| rng.gen_range(d.lo[i]..=d.hi[i])).collect()
}

fn compatible<R: Rng>(rng: &mut R) -> Result<BundleData> {
    let rank = rng.gen_range(1..=3);
    let dim = rng.gen_range(1..=2);
    random_compatible_bundle(rng, rank, dim)
}

fn single(c: Component) -> Result<Bordism> {
    Bordism::single(c)
}

fn max(acc: &mut f64, v: f64) {
    *acc = acc.max(v);
}

fn user_compatible(cfg: &SuiteConfig) -> Vec<TftData> {
    cfg.bundles
        .iter()
        .filter_map(|b| TftData::new(b.clone()).ok())
        .collect()
}

fn multiplicativity(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    const CASES: usize = 50;
    let mut rng = rng_for(cfg, 1);
    let mut worst = 0.0;
    for k in 0..CASES + cfg.bundles.len() {
        let b = match cfg.bundles.get(k) {
            Some(b) => b.clone(),
            None if k % 2 == 0 => compatible(&mut rng)?,
            None => {
                let (n, m) = (rng.gen_range(1..=3), rng.gen_range(1..=2));
                random_bundle(&mut rng, n, m)?
            }
        };
        let path = random_path(&mut rng, b.domain());
        let a = rng.gen_range(0.05..0.95);
        let whole = parallel_transport_with_rtol(&b, &path, 0.0, 1.0, 1e-10)?;
        let first = parallel_transport_with_rtol(&b, &cut_rescale(&path, 0.0, a)?, 0.0, 1.0, 1e-10)?;
        let second = parallel_transport_with_rtol(&b, &cut_rescale(&path, a, 1.0)?, 0.0, 1.0, 1e-10)?;
        max(&mut worst, (&second * &first).distance(&whole));
    }
    Ok(vec![Check::new(
        format!("{} splits, max deviation", CASES + cfg.bundles.len()),
        worst,
        Bound::AtMost(1e-8),
    )])
}

fn constant_paths(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    const CASES: usize = 20;
    let mut rng = rng_for(cfg, 2);
    let mut worst = 0.0;
    for k in 0..CASES + cfg.bundles.len() {
        let b = match cfg.bundles.get(k) {
            Some(b) => b.clone(),
            None => {
                let (n, m) = (rng.gen_range(1..=3), rng.gen_range(1..=2));
                random_bundle(&mut rng, n, m)?
            }
        };
        let x = random_point(&mut rng, b.domain());
        let (s, e) = (rng.gen_range(-1.0..0.0), rng.gen_range(0.0..1.0));
        let p = parallel_transport(&b, &PathData::constant(&x), s, e)?;
        max(&mut worst, p.distance(&DenseMatrix::identity(b.rank())));
    }
    Ok(vec![Check::new("max deviation from I", worst, Bound::AtMost(1e-12))])
}

fn reparametrization(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    const CASES: usize = 30;
    let mut rng = rng_for(cfg, 3);
    let mut worst = 0.0;
    for _ in 0..CASES {
        let z = TftData::new(compatible(&mut rng)?)?;
        let path = random_path(&mut rng, z.bundle().domain());
        let f = random_increasing_reparametrization(&mut rng);
        let fa = f.eval(&Assignment::new().with_t(0.0))?;
        let fb = f.eval(&Assignment::new().with_t(1.0))?;
        let lhs = evaluate(
            &z,
            &single(Component::standard(path.substitute_time(&f)?, &[0.0, 1.0])?)?,
        )?;
        let rhs = evaluate(&z, &single(Component::standard(path, &[fa, fb])?)?)?;
        max(&mut worst, lhs.matrix.distance(&rhs.matrix));
    }
    Ok(vec![Check::new(
        format!("{CASES} maps, max deviation"),
        worst,
        Bound::AtMost(1e-8),
    )])
}

fn random_modification<R: Rng>(rng: &mut R) -> Result<Arc<crate::bordism::ModificationFn>> {
    let kind = match rng.gen_range(0..3) {
        0 => ModificationKind::TwoSided,
        1 => ModificationKind::Left,
        _ => ModificationKind::Right,
    };
    let lo = rng.gen_range(0.02..0.3);
    let hi = rng.gen_range(0.7..0.98);
    let w = rng.gen_range(1.0..6.0);
    let shape = SmoothExpr::constant(1.2) + SmoothExpr::sin(&(SmoothExpr::t() * w));
    let bump = standard_bump(lo, hi) * shape;
    Ok(Arc::new(build_modification(kind, 0.0, 1.0, &bump, (lo, hi))?))
}

fn modification_independence(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    const CASES: usize = 30;
    const SITTING_CASES: usize = 10;
    let mut rng = rng_for(cfg, 4);
    let mut worst = 0.0;
    for _ in 0..CASES {
        let z = TftData::new(compatible(&mut rng)?)?;
        let path = random_path(&mut rng, z.bundle().domain());
        let (c1, c2) = (random_modification(&mut rng)?, random_modification(&mut rng)?);
        let v1 = evaluate(&z, &single(Component::standard(path.reparametrize(c1), &[0.0, 1.0])?)?)?;
        let v2 = evaluate(&z, &single(Component::standard(path.reparametrize(c2), &[0.0, 1.0])?)?)?;
        max(&mut worst, v1.matrix.distance(&v2.matrix));
    }
    let mut sitting = 0.0;
    for _ in 0..SITTING_CASES {
        let z = TftData::new(compatible(&mut rng)?)?;
        let path = random_path(&mut rng, z.bundle().domain());
        let mid = rng.gen_range(0.2..0.8);
        let b = single(Component::standard(path, &[0.0, mid, 1.0])?)?;
        let v = evaluate(&z, &b)?;
        let w = evaluate(&z, &insert_sitting_instants(&b)?)?;
        max(&mut sitting, v.matrix.distance(&w.matrix));
    }
    Ok(vec![
        Check::new(format!("{CASES} pairs, max deviation"), worst, Bound::AtMost(1e-8)),
        Check::new("sitting instants, max deviation", sitting, Bound::AtMost(1e-8)),
    ])
}

fn snake(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    const CASES: usize = 20;
    let mut rng = rng_for(cfg, 5);
    let mut constant = 0.0;
    for _ in 0..CASES {
        let n = rng.gen_range(1..=3);
        let negatives = rng.gen_range(0..=n);
        let beta = random_symmetric_form(&mut rng, n, negatives);
        let z = TftData::new(BundleData::flat_with_form(&beta, DomainBox::cube(2, 1.0))?)?;
        let x = random_point(&mut rng, z.bundle().domain());
        let p = PathData::constant(&x);
        max(&mut constant, snake_check(&z, &p, 0.0, 1.0)?);
        max(&mut constant, snake_check_oriented(&z, &p, 0.0, 1.0)?);
    }
    let mut transported = 0.0;
    let mut theories = user_compatible(cfg);
    for _ in 0..CASES {
        theories.push(TftData::new(compatible(&mut rng)?)?);
    }
    for z in &theories {
        let p = random_path(&mut rng, z.bundle().domain());
        max(&mut transported, snake_check(z, &p, 0.0, 1.0)?);
        max(&mut transported, snake_check_oriented(z, &p, 0.0, 1.0)?);
    }
    Ok(vec![
        Check::new("constant elbows", constant, Bound::AtMost(1e-12)),
        Check::new(format!("{} bundles", theories.len()), transported, Bound::AtMost(1e-8)),
    ])
}

fn circles(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    const CASES: usize = 20;
    let mut rng = rng_for(cfg, 6);
    let mut flat = 0.0;
    let mut pairing = 0.0;
    for _ in 0..CASES {
        let n = rng.gen_range(1..=4);
        let negatives = rng.gen_range(0..=n);
        let beta = random_symmetric_form(&mut rng, n, negatives);
        let z = TftData::new(BundleData::flat_with_form(&beta, DomainBox::cube(2, 1.0))?)?;
        let lp = random_loop(&mut rng, z.bundle().domain());
        let v = evaluate(&z, &single(Component::circle(lp)?)?)?;
        max(&mut flat, (v.matrix[(0, 0)] - n as f64).abs());
    }
    let mut theories = user_compatible(cfg);
    for _ in 0..CASES {
        theories.push(TftData::new(compatible(&mut rng)?)?);
    }
    let mut reversal = 0.0;
    for z in &theories {
        let d = z.bundle().domain();
        let lp = random_loop(&mut rng, d);
        let fwd = evaluate(z, &single(Component::circle(lp.clone())?)?)?;
        let back = evaluate(z, &single(Component::circle(lp.reversed())?)?)?;
        max(&mut reversal, (fwd.matrix[(0, 0)] - back.matrix[(0, 0)]).abs());

        let x = PathData::constant(&random_point(&mut rng, d));
        let beta = evaluate(z, &single(Component::right_elbow(x.clone(), 0.0, 1.0)?)?)?;
        let tau = evaluate(z, &single(Component::left_elbow(x, 0.0, 1.0)?)?)?;
        let value = (&beta.matrix * &tau.matrix)[(0, 0)];
        max(&mut pairing, (value - z.rank() as f64).abs());
    }
    Ok(vec![
        Check::new("flat trace - n", flat, Bound::AtMost(1e-12)),
        Check::new("reversed loop", reversal, Bound::AtMost(1e-8)),
        Check::new("beta(tau) - n", pairing, Bound::AtMost(1e-12)),
    ])
}

fn elbow_swap(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    const CASES: usize = 20;
    let mut rng = rng_for(cfg, 7);
    let mut asym = 0.0;
    let mut swap = 0.0;
    for _ in 0..CASES {
        let z = TftData::new(compatible(&mut rng)?)?;
        let x = random_point(&mut rng, z.bundle().domain());
        let path = random_path(&mut rng, z.bundle().domain());
        let o = TftBackedOracle::new(z.clone());
        max(&mut asym, o.right_elbow(&x)?.asymmetry());

        let e = Component::right_elbow(path, 0.0, 1.0)?;
        let v = evaluate(&z, &single(e.clone())?)?;
        let s = evaluate(&z, &single(swap_elbow(&e, 0.0, 1.0)?)?)?;
        max(&mut swap, s.matrix.distance(&(&v.matrix * &swap_matrix(z.rank()))));
    }
    Ok(vec![
        Check::new("extracted form asymmetry", asym, Bound::AtMost(1e-9)),
        Check::new("swapped elbow", swap, Bound::AtMost(1e-8)),
    ])
}

fn connection_reconstruction(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    const STEPS: [f64; 3] = [2e-4, 1e-4, 5e-5];
    let mut rng = rng_for(cfg, 8);
    let mut checks = Vec::new();
    for k in 0..2 {
        let b = random_compatible_bundle(&mut rng, 2, 2)?;
        // the difference quotient needs transports well below h^3
        let o = TftBackedOracle::new(TftData::new(b.clone())?.with_rtol(1e-12));
        let study = convergence_study(&o, &b, &STEPS, 4)?;
        let c = study
            .errors
            .iter()
            .zip(&study.steps)
            .map(|(e, h)| e / (h * h))
            .fold(0.0, f64::max);
        for (j, p) in study.orders.iter().enumerate() {
            checks.push(Check::new(
                format!("bundle {k} order h={:e}/{:e}", STEPS[j], STEPS[j + 1]),
                *p,
                Bound::Within(1.8, 2.2),
            ));
        }
        checks.push(Check::new(format!("bundle {k} error/h^2"), c, Bound::AtMost(1e3)));
    }
    Ok(checks)
}

fn round_trip(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    const SAMPLES: usize = 20;
    let mut rng = rng_for(cfg, 9);
    let settings = ReconstructionSettings {
        seed: cfg.seed,
        ..ReconstructionSettings::default()
    };
    let z = TftData::new(random_compatible_bundle(&mut rng, 2, 2)?)?;
    let rec = roundtrip(&TftBackedOracle::new(z), settings, SAMPLES)?;
    let unoriented = rec.report.roundtrip.expect("roundtrip fills the comparison");

    let z = TftData::unchecked(random_bundle(&mut rng, 2, 2)?, 1e-9)?;
    let rec = roundtrip(&TftBackedOracle::oriented(z), settings, SAMPLES)?;
    let oriented = rec.report.roundtrip.expect("roundtrip fills the comparison");
    Ok(vec![
        Check::new(
            format!("{SAMPLES} mixed bordisms"),
            unoriented.max_deviation,
            Bound::AtMost(unoriented.tolerance),
        ),
        Check::new(
            format!("oriented, {SAMPLES} bordisms"),
            oriented.max_deviation,
            Bound::AtMost(oriented.tolerance),
        ),
    ])
}

fn thin_and_segal(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    const CASES: usize = 20;
    let mut rng = rng_for(cfg, 10);
    let mut thin = 0.0;
    let mut segal = 0.0;
    for _ in 0..CASES {
        let z = TftData::new(compatible(&mut rng)?)?;
        let path = random_path(&mut rng, z.bundle().domain());
        let c = rng.gen_range(-1.0..1.0);
        let v = evaluate(&z, &single(Component::standard(path.clone(), &[c, c])?)?)?;
        max(&mut thin, v.matrix.distance(&DenseMatrix::identity(z.rank())));

        let t0 = rng.gen_range(-0.5..0.0);
        let t1 = rng.gen_range(0.1..0.6);
        let t2 = rng.gen_range(0.7..1.2);
        let b = single(Component::standard(path, &[t0, t1, t2])?)?;
        let whole = evaluate(&z, &simplicial_map(&b, &[0, 2])?)?;
        let first = evaluate(&z, &simplicial_map(&b, &[0, 1])?)?;
        let second = evaluate(&z, &simplicial_map(&b, &[1, 2])?)?;
        max(&mut segal, whole.matrix.distance(&(&second.matrix * &first.matrix)));
    }
    Ok(vec![
        Check::new("thin deviation from I", thin, Bound::AtMost(1e-12)),
        Check::new("face map vs product", segal, Bound::AtMost(1e-8)),
    ])
}

fn family_gluing(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    const SHIFT: f64 = 0.02;
    let mut rng = rng_for(cfg, 11);
    let z = TftData::new(random_compatible_bundle(&mut rng, 2, 2)?)?;
    let base = random_path(&mut rng, z.bundle().domain());
    let mut comps = base.components().to_vec();
    comps[0] = comps[0].clone() + SmoothExpr::s() * 0.1;
    // sitting instants near both ends make the two cut placements equivalent
    let path = PathData::new(comps)?.reparametrize(Arc::new(standard_two_sided(0.0, 1.0)?));

    let first = |s: f64| Component::standard(path.at_fiber(s), &[0.05, 0.95]);
    let second = |s: f64| {
        let shifted = path.at_fiber(s).reparametrize(Arc::new(Affine {
            offset: -SHIFT * s,
            slope: 1.0,
        }));
        Component::standard(shifted, &[0.1 + SHIFT * s, 0.9 + SHIFT * s])
    };
    let f1 = Family {
        fibers: Family::grid(0.0, 1.2, 7)
            .into_iter()
            .map(|s| Ok((s, single(first(s)?)?)))
            .collect::<Result<_>>()?,
    };
    let f2 = Family {
        fibers: Family::grid(0.8, 2.0, 7)
            .into_iter()
            .map(|s| Ok((s, single(second(s)?)?)))
            .collect::<Result<_>>()?,
    };
    let arg = (SmoothExpr::s() - 0.8) * (std::f64::consts::PI / 0.4);
    let chi1 = (SmoothExpr::one() + SmoothExpr::cos(&arg)) * 0.5;
    let overlap = Overlap {
        transition: SmoothExpr::t() + SmoothExpr::s() * SHIFT,
        chi2: SmoothExpr::one() - chi1.clone(),
        chi1,
    };
    let glued = glue_family(&f1, &f2, &overlap)?;
    let opts = EvalOptions::default();
    let values = evaluate_family(&z, &glued, opts)?;
    let (e1, e2) = (evaluate_family(&z, &f1, opts)?, evaluate_family(&z, &f2, opts)?);
    let mut worst = 0.0;
    let mut compared = 0;
    for (s, v) in &values.fibers {
        for presentation in [&e1, &e2] {
            if let Some((_, w)) = presentation.fibers.iter().find(|(x, _)| (x - s).abs() <= 1e-12) {
                max(&mut worst, v.matrix.distance(&w.matrix));
                compared += 1;
            }
        }
    }
    Ok(vec![Check::new(
        format!("{compared} fiber comparisons"),
        worst,
        Bound::AtMost(1e-9),
    )])
}

fn negative_controls(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    const CASES: usize = 5;
    let mut rng = rng_for(cfg, 12);
    let mut residual = f64::INFINITY;
    let mut midpoint = f64::INFINITY;
    for _ in 0..CASES {
        let b = random_bundle(&mut rng, 2, 2)?;
        let report = check_compatibility(&b, &b.domain().grid(5), 1e-9)?;
        residual = residual.min(report.max_residual);
        let z = TftData::unchecked(b, 1e-9)?;
        let path = random_path(&mut rng, z.bundle().domain());
        let e = Component::right_elbow(path, 0.0, 1.0)?;
        midpoint = midpoint.min(elbow_midpoint_invariance(&z, &e, 0.3, 0.7)?);
    }

    let rotation = TftData::new(BundleData::constant(
        &[
            DenseMatrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]),
            DenseMatrix::zeros(2, 2),
        ],
        &DenseMatrix::identity(2),
        DomainBox::cube(2, 1.0),
    )?)?;
    let zero = ZeroTransportOracle {
        inner: TftBackedOracle::new(rotation.clone()),
        window: (0.45, 0.55),
    };
    let buggy = CompositionBugOracle {
        inner: TftBackedOracle::new(rotation.clone()),
        strength: 1e-3,
    };
    let mut missed = 0.0;
    if !preflight(&zero, cfg.seed)?.violated().contains(&INVERTIBILITY) {
        missed += 1.0;
    }
    let report = preflight(&buggy, cfg.seed)?;
    let named = report.violated().contains(&MULTIPLICATIVITY)
        && report
            .check(MULTIPLICATIVITY)
            .is_some_and(|c| c.detail.starts_with("split"));
    if !named {
        missed += 1.0;
    }
    if !preflight(&TftBackedOracle::new(rotation), cfg.seed)?.passed() {
        missed += 1.0;
    }
    Ok(vec![
        Check::new("incompatible residual", residual, Bound::AtLeast(1e-3)),
        Check::new("elbow midpoint drift", midpoint, Bound::AtLeast(1e-3)),
        Check::new("preflight misdiagnoses", missed, Bound::AtMost(0.0)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert!(Bound::AtMost(1.0).holds(1.0));
        assert!(!Bound::AtLeast(1.0).holds(0.5));
        assert!(Bound::Within(1.8, 2.2).holds(2.0));
        assert!(!Bound::Within(1.8, 2.2).holds(f64::NAN));
    }

    #[test]
    fn unknown_criterion_fails() {
        let v = run_criterion(13, &SuiteConfig::default());
        assert!(!v.passed());
        assert!(v.error.is_some());
    }
}
