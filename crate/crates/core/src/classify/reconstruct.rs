use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bordism::{standard_two_sided, Bordism, Component, ModificationFn, Orientation};
use crate::bundle::random::{random_loop, random_path};
use crate::bundle::{check_compatibility, BundleData, CompatibilityReport, DomainBox, PathData};
use crate::error::{Error, Result};
use crate::numerics::{indefinite_orthonormalize, ChebyshevGrid, DenseMatrix, OrthonormalBasis, Sign, SmoothExpr};
use crate::tft::{evaluate_with, EvalOptions, TftData};

use super::oracle::{OracleEvaluator, TftOracle};
use super::preflight::{preflight, PreflightReport};

pub const DEFAULT_STEP: f64 = 1e-4;
pub const MIN_STEP: f64 = 1e-8;
pub const DEFAULT_DEGREE: usize = 4;
pub const RECONSTRUCTED_COMPATIBILITY: f64 = 1e-5;
pub const FORM_SYMMETRY_TOLERANCE: f64 = 1e-9;
pub const FORM_DEGENERACY_THRESHOLD: f64 = 1e-8;
pub const ROUNDTRIP_TOLERANCE: f64 = 1e-6;

/// Sitting-instant reparametrization shared by all probes.
#[derive(Debug, Clone)]
pub struct Probe {
    chi: Arc<ModificationFn>,
}

impl Probe {
    pub fn new() -> Result<Self> {
        Ok(Self {
            chi: Arc::new(standard_two_sided(0.0, 1.0)?),
        })
    }

    /// Transport from `x − εv` to `x` along the straight line, with
    /// sitting instants at both ends.
    pub fn transport(&self, o: &dyn TftOracle, x: &[f64], v: &[f64], eps: f64) -> Result<DenseMatrix> {
        let start: Vec<f64> = x.iter().zip(v).map(|(xi, vi)| xi - eps * vi).collect();
        for y in [&start, &x.to_vec()] {
            if !o.domain().contains(y) {
                return Err(Error::OutOfDomain {
                    t: 0.0,
                    point: y.clone(),
                });
            }
        }
        let components = x
            .iter()
            .zip(v)
            .map(|(xi, vi)| SmoothExpr::constant(*xi) + (SmoothExpr::t() - 1.0) * (eps * vi))
            .collect();
        let path = PathData::new(components)?.reparametrize(self.chi.clone());
        o.transport(&path, 0.0, 1.0)
    }

    /// `ω(v)` at `x` by the central difference `−(Q(h) − Q(−h)) / 2h`.
    pub fn connection(&self, o: &dyn TftOracle, x: &[f64], v: &[f64], h: f64) -> Result<DenseMatrix> {
        if !(h >= MIN_STEP) || !h.is_finite() {
            return Err(Error::Precondition(format!(
                "difference step {h} is below the floor {MIN_STEP:e}"
            )));
        }
        let fwd = self.transport(o, x, v, h)?;
        let bwd = self.transport(o, x, v, -h)?;
        Ok((&fwd - &bwd).scale(-0.5 / h))
    }
}

/// `ω(v)` at `x` recovered from the oracle with step `h`.
pub fn reconstruct_connection(o: &dyn TftOracle, x: &[f64], v: &[f64], h: f64) -> Result<DenseMatrix> {
    Probe::new()?.connection(o, x, v, h)
}

#[derive(Debug, Clone)]
pub struct ExtractedForm {
    pub beta: DenseMatrix,
    pub asymmetry: f64,
    pub basis: OrthonormalBasis,
    /// `‖β τ − I‖` with `τ` the left elbow value.
    pub copairing_residual: f64,
}

/// The bilinear form at `x`, read off a constant right elbow.
pub fn extract_form(o: &dyn TftOracle, x: &[f64]) -> Result<ExtractedForm> {
    let raw = o.right_elbow(x)?;
    let asymmetry = raw.asymmetry();
    if asymmetry > FORM_SYMMETRY_TOLERANCE {
        return Err(Error::Asymmetric { asymmetry });
    }
    let det = raw.determinant();
    if !(det.abs() > FORM_DEGENERACY_THRESHOLD) {
        return Err(Error::Degenerate { det });
    }
    let n = raw.rows();
    let beta = DenseMatrix::from_fn(n, n, |i, j| 0.5 * (raw[(i, j)] + raw[(j, i)]));
    let basis = indefinite_orthonormalize(&beta)?;
    let tau = o.left_elbow(x)?;
    let copairing_residual = (&beta * &tau).distance(&DenseMatrix::identity(n));
    Ok(ExtractedForm {
        beta,
        asymmetry,
        basis,
        copairing_residual,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ReconstructionSettings {
    pub degree: usize,
    pub step: f64,
    pub compatibility_tolerance: f64,
    pub seed: u64,
}

impl Default for ReconstructionSettings {
    fn default() -> Self {
        Self {
            degree: DEFAULT_DEGREE,
            step: DEFAULT_STEP,
            compatibility_tolerance: RECONSTRUCTED_COMPATIBILITY,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RoundTrip {
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl RoundTrip {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct ReconstructionReport {
    pub rank: usize,
    pub dim: usize,
    pub step: f64,
    pub degree: usize,
    pub preflight: PreflightReport,
    pub points: Vec<Vec<f64>>,
    /// `omega[k][μ]` at `points[k]`.
    pub omega: Vec<Vec<DenseMatrix>>,
    pub beta: Option<Vec<DenseMatrix>>,
    pub signature: Option<Vec<Sign>>,
    /// Per point, `max_μ ‖ω_h − ω_{2h}‖`.
    pub residuals: Vec<f64>,
    /// Order observed between steps `4h`, `2h`, `h`; `None` when the
    /// differences vanish.
    pub order: Option<f64>,
    pub compatibility: Option<CompatibilityReport>,
    pub roundtrip: Option<RoundTrip>,
}

impl ReconstructionReport {
    pub fn signature_string(&self) -> Option<String> {
        self.signature
            .as_ref()
            .map(|s| s.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(""))
    }

    /// `key = value` summary lines, sorted by key.
    pub fn summary(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("rank".to_string(), self.rank.to_string()),
            ("dim".to_string(), self.dim.to_string()),
            ("step".to_string(), format!("{:e}", self.step)),
            ("degree".to_string(), self.degree.to_string()),
            ("points".to_string(), self.points.len().to_string()),
            ("preflight".to_string(), pass(self.preflight.passed()).into()),
            (
                "residual.max".to_string(),
                format!("{:.3e}", self.residuals.iter().cloned().fold(0.0, f64::max)),
            ),
            (
                "order".to_string(),
                self.order.map_or("n/a".to_string(), |p| format!("{p:.3}")),
            ),
        ];
        if let Some(s) = self.signature_string() {
            out.push(("signature".into(), s));
        }
        if let Some(c) = &self.compatibility {
            out.push(("compatibility.max".into(), format!("{:.3e}", c.max_residual)));
            out.push(("compatibility".into(), pass(c.passed()).into()));
        }
        if let Some(r) = &self.roundtrip {
            out.push(("roundtrip.max".into(), format!("{:.3e}", r.max_deviation)));
            out.push(("roundtrip.samples".into(), r.deviations.len().to_string()));
            out.push(("roundtrip".into(), pass(r.passed()).into()));
        }
        out.sort();
        out
    }

    /// One row per grid point: coordinates, residual, `‖ω_μ‖`.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let mut header = String::new();
        for i in 0..self.dim {
            header += &format!("{:>10}", format!("x{}", i + 1));
        }
        header += &format!("{:>12}", "residual");
        for mu in 0..self.dim {
            header += &format!("{:>12}", format!("|omega{}|", mu + 1));
        }
        s += &header;
        s.push('\n');
        for (k, x) in self.points.iter().enumerate() {
            for xi in x {
                s += &format!("{xi:>10.4}");
            }
            s += &format!("{:>12.3e}", self.residuals[k]);
            for w in &self.omega[k] {
                s += &format!("{:>12.6}", w.frobenius_norm());
            }
            s.push('\n');
        }
        s
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub theory: TftData,
    pub report: ReconstructionReport,
}

fn unit(dim: usize, mu: usize) -> Vec<f64> {
    (0..dim).map(|i| if i == mu { 1.0 } else { 0.0 }).collect()
}

/// Recovers a bundle from an oracle: connection by central differences on a
/// Chebyshev grid, form from constant right elbows, both interpolated.
pub fn reconstruct(o: &dyn TftOracle, settings: ReconstructionSettings) -> Result<Reconstruction> {
    let pre = preflight(o, settings.seed)?;
    if !pre.passed() {
        return Err(Error::Oracle(format!("oracle violates {}", pre.violated().join(", "))));
    }
    let n = o.rank();
    let domain: DomainBox = o.domain().clone();
    let m = domain.dim();
    let grid = ChebyshevGrid::new(&domain.lo, &domain.hi, settings.degree)?;
    let points = grid.points();
    let probe = Probe::new()?;
    let h = settings.step;

    let mut omega = Vec::with_capacity(points.len());
    let mut residuals = Vec::with_capacity(points.len());
    let (mut d1, mut d2) = (0.0f64, 0.0f64);
    for x in &points {
        let mut at = Vec::with_capacity(m);
        let mut res = 0.0f64;
        for mu in 0..m {
            let v = unit(m, mu);
            let w1 = probe.connection(o, x, &v, h)?;
            let w2 = probe.connection(o, x, &v, 2.0 * h)?;
            let w4 = probe.connection(o, x, &v, 4.0 * h)?;
            let e12 = w1.distance(&w2);
            res = res.max(e12);
            d1 = d1.max(w4.distance(&w2));
            d2 = d2.max(e12);
            at.push(w1);
        }
        omega.push(at);
        residuals.push(res);
    }
    let order = (d1 > 0.0 && d2 > 0.0).then(|| (d1 / d2).log2());

    let (beta, signature) = if o.has_elbows() {
        let mut betas = Vec::with_capacity(points.len());
        let mut signature: Option<Vec<Sign>> = None;
        for x in &points {
            let f = extract_form(o, x)?;
            match &signature {
                None => signature = Some(f.basis.signs.clone()),
                Some(s) if *s != f.basis.signs => {
                    return Err(Error::Oracle(format!("signature of the form changes near {x:?}")));
                }
                _ => {}
            }
            betas.push(f.beta);
        }
        (Some(betas), signature)
    } else {
        (None, None)
    };

    let interpolate = |entry: &dyn Fn(usize) -> f64| -> Result<SmoothExpr> {
        let values: Vec<f64> = (0..points.len()).map(entry).collect();
        grid.interpolate(&values)
    };
    let mut omega_expr = Vec::with_capacity(m);
    for mu in 0..m {
        let mut mat = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                row.push(interpolate(&|k| omega[k][mu][(i, j)])?);
            }
            mat.push(row);
        }
        omega_expr.push(mat);
    }
    let beta_expr = match &beta {
        Some(b) => {
            let mut mat = Vec::with_capacity(n);
            for i in 0..n {
                let mut row = Vec::with_capacity(n);
                for j in 0..n {
                    row.push(interpolate(&|k| b[k][(i, j)])?);
                }
                mat.push(row);
            }
            mat
        }
        None => (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| SmoothExpr::constant(if i == j { 1.0 } else { 0.0 }))
                    .collect()
            })
            .collect(),
    };
    let bundle = BundleData::new(n, omega_expr, beta_expr, domain.clone())?;
    let tol = settings.compatibility_tolerance;
    let (theory, compatibility) = if o.has_elbows() {
        let report = check_compatibility(&bundle, &domain.grid(5), tol)?;
        if !report.passed() {
            return Err(Error::Oracle(format!(
                "reconstructed connection and form are incompatible: {report}"
            )));
        }
        (TftData::with_tolerance(bundle, tol)?, Some(report))
    } else {
        (TftData::unchecked(bundle, tol)?, None)
    };

    Ok(Reconstruction {
        theory,
        report: ReconstructionReport {
            rank: n,
            dim: m,
            step: h,
            degree: settings.degree,
            preflight: pre,
            points,
            omega,
            beta,
            signature,
            residuals,
            order,
            compatibility,
            roundtrip: None,
        },
    })
}

/// Sample bordisms over `domain` for round-trip comparison: intervals,
/// composites, circles and, when `elbows`, elbows and a snake-shaped union.
pub fn sample_bordisms(domain: &DomainBox, count: usize, elbows: bool, seed: u64) -> Result<Vec<Bordism>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let kinds = if elbows { 5 } else { 3 };
    for k in 0..count {
        let c = match k % kinds {
            0 => Component::standard(random_path(&mut rng, domain), &[0.0, 1.0])?,
            1 => {
                let mid = rng.gen_range(0.2..0.8);
                Component::standard(random_path(&mut rng, domain), &[0.0, mid, 1.0])?
            }
            2 => Component::circle(random_loop(&mut rng, domain))?,
            3 => Component::right_elbow(random_path(&mut rng, domain), 0.0, 1.0)?,
            _ => Component::left_elbow(random_path(&mut rng, domain), 0.0, 1.0)?,
        };
        let c = if elbows {
            c
        } else {
            c.with_orientation(Orientation::Positive)
        };
        out.push(Bordism::single(c)?);
    }
    Ok(out)
}

/// Compares the oracle and the reconstruction on `samples`.
pub fn compare_on(o: &dyn TftOracle, theory: &TftData, samples: &[Bordism]) -> Result<RoundTrip> {
    let opts = EvalOptions {
        oriented: !o.has_elbows(),
        ..EvalOptions::default()
    };
    let direct = OracleEvaluator { oracle: o };
    let mut deviations = Vec::with_capacity(samples.len());
    for b in samples {
        let lhs = evaluate_with(&direct, b, opts)?;
        let rhs = evaluate_with(theory, b, opts)?;
        deviations.push(lhs.matrix.distance(&rhs.matrix));
    }
    let max_deviation = deviations.iter().cloned().fold(0.0, f64::max);
    Ok(RoundTrip {
        deviations,
        max_deviation,
        tolerance: ROUNDTRIP_TOLERANCE,
    })
}

/// Reconstructs and compares on `count` seeded sample bordisms.
pub fn roundtrip(o: &dyn TftOracle, settings: ReconstructionSettings, count: usize) -> Result<Reconstruction> {
    let mut rec = reconstruct(o, settings)?;
    let samples = sample_bordisms(o.domain(), count, o.has_elbows(), settings.seed.wrapping_add(1))?;
    rec.report.roundtrip = Some(compare_on(o, &rec.theory, &samples)?);
    Ok(rec)
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// `log(e_k / e_{k+1}) / log(h_k / h_{k+1})`.
    pub orders: Vec<f64>,
}

/// Sup error of the difference quotient against a known connection, over
/// the Chebyshev grid and all coordinate directions, for each step.
pub fn convergence_study(
    o: &dyn TftOracle,
    truth: &BundleData,
    steps: &[f64],
    degree: usize,
) -> Result<ConvergenceStudy> {
    let domain = o.domain();
    let grid = ChebyshevGrid::new(&domain.lo, &domain.hi, degree)?;
    let probe = Probe::new()?;
    let m = domain.dim();
    let mut errors = Vec::with_capacity(steps.len());
    for &h in steps {
        let mut worst = 0.0f64;
        for x in grid.points() {
            for mu in 0..m {
                let w = probe.connection(o, &x, &unit(m, mu), h)?;
                worst = worst.max(w.distance(&truth.omega_at(mu, &x)?));
            }
        }
        errors.push(worst);
    }
    let orders = steps
        .windows(2)
        .zip(errors.windows(2))
        .map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    Ok(ConvergenceStudy {
        steps: steps.to_vec(),
        errors,
        orders,
    })
}
