use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::random::random_path;
use crate::bundle::{cut_rescale, PathData};
use crate::error::Result;
use crate::numerics::DenseMatrix;

use super::oracle::TftOracle;

pub const IDENTITY_TOLERANCE: f64 = 1e-12;
pub const MULTIPLICATIVITY_TOLERANCE: f64 = 1e-8;
pub const INVERTIBILITY_FLOOR: f64 = 1e-8;
pub const SPLIT_COUNT: usize = 20;

pub const CONSTANT_IDENTITY: &str = "constant-path identity";
pub const MULTIPLICATIVITY: &str = "multiplicativity";
pub const INVERTIBILITY: &str = "invertibility";

#[derive(Debug, Clone, PartialEq)]
pub struct PreflightCheck {
    pub hypothesis: &'static str,
    pub passed: bool,
    pub worst: f64,
    pub tolerance: f64,
    /// The offending query when failed, the worst one otherwise.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreflightReport {
    pub checks: Vec<PreflightCheck>,
}

impl PreflightReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn violated(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.hypothesis).collect()
    }

    pub fn check(&self, hypothesis: &str) -> Option<&PreflightCheck> {
        self.checks.iter().find(|c| c.hypothesis == hypothesis)
    }
}

impl fmt::Display for PreflightReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<24} worst {:.3e} (tol {:.0e}) {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.hypothesis,
                c.worst,
                c.tolerance,
                c.detail
            )?;
        }
        Ok(())
    }
}

struct Tracker {
    worst: f64,
    detail: String,
    failed: Option<String>,
}

impl Tracker {
    fn new(start: f64) -> Self {
        Self {
            worst: start,
            detail: String::new(),
            failed: None,
        }
    }

    fn finish(self, hypothesis: &'static str, tolerance: f64) -> PreflightCheck {
        PreflightCheck {
            hypothesis,
            passed: self.failed.is_none(),
            worst: self.worst,
            tolerance,
            detail: self.failed.unwrap_or(self.detail),
        }
    }
}

/// Checks that the oracle's transports behave like a parallel transport
/// before anything is reconstructed from them.
pub fn preflight(o: &dyn TftOracle, seed: u64) -> Result<PreflightReport> {
    let n = o.rank();
    let id = DenseMatrix::identity(n);
    let domain = o.domain().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut identity = Tracker::new(0.0);
    let mut mult = Tracker::new(0.0);
    let mut inv = Tracker::new(f64::INFINITY);
    let mut det_check = |p: &DenseMatrix, what: String| {
        let d = p.determinant().abs();
        if d < inv.worst {
            inv.worst = d;
            inv.detail = what.clone();
        }
        if !(d > INVERTIBILITY_FLOOR) && inv.failed.is_none() {
            inv.failed = Some(format!("{what}: |det| = {d:.3e}"));
        }
    };

    let mut points = vec![domain.center()];
    for _ in 0..4 {
        points.push(
            (0..domain.dim())
                .map(|i| rng.gen_range(domain.lo[i]..=domain.hi[i]))
                .collect(),
        );
    }
    for x in &points {
        let p = o.transport(&PathData::constant(x), 0.0, 1.0)?;
        let what = format!("constant path at {x:?}");
        let e = p.distance(&id);
        if e > identity.worst {
            identity.worst = e;
            identity.detail = what.clone();
        }
        if !(e <= IDENTITY_TOLERANCE) && identity.failed.is_none() {
            identity.failed = Some(format!("{what}: deviation {e:.3e}"));
        }
        det_check(&p, what);
    }

    for k in 0..SPLIT_COUNT {
        let path = random_path(&mut rng, &domain);
        let a = rng.gen_range(0.1..0.9);
        let whole = o.transport(&path, 0.0, 1.0)?;
        let first = o.transport(&cut_rescale(&path, 0.0, a)?, 0.0, 1.0)?;
        let second = o.transport(&cut_rescale(&path, a, 1.0)?, 0.0, 1.0)?;
        let what = format!("split {k} at a = {a:.6}");
        let e = (&second * &first).distance(&whole);
        if e > mult.worst {
            mult.worst = e;
            mult.detail = what.clone();
        }
        if !(e <= MULTIPLICATIVITY_TOLERANCE) && mult.failed.is_none() {
            mult.failed = Some(format!("{what}: defect {e:.3e}"));
        }
        det_check(&whole, format!("{what}, whole path"));
        det_check(&first, format!("{what}, first piece"));
        det_check(&second, format!("{what}, second piece"));
    }

    Ok(PreflightReport {
        checks: vec![
            identity.finish(CONSTANT_IDENTITY, IDENTITY_TOLERANCE),
            mult.finish(MULTIPLICATIVITY, MULTIPLICATIVITY_TOLERANCE),
            inv.finish(INVERTIBILITY, INVERTIBILITY_FLOOR),
        ],
    })
}
