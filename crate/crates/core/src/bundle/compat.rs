use std::fmt;

use crate::error::Result;
use crate::numerics::DenseMatrix;

use super::data::BundleData;

/// Default tolerance for the compatibility residual.
pub const COMPATIBILITY_TOLERANCE: f64 = 1e-9;

/// Outcome of a compatibility scan.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityReport {
    pub max_residual: f64,
    pub worst_point: Vec<f64>,
    /// 0-based direction of the worst residual.
    pub worst_direction: usize,
    pub tolerance: f64,
    pub samples: usize,
}

impl CompatibilityReport {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

impl fmt::Display for CompatibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "compatibility residual {:e} (tol {:e}) at {:?}, direction x{}: {}",
            self.max_residual,
            self.tolerance,
            self.worst_point,
            self.worst_direction + 1,
            if self.passed() { "pass" } else { "fail" }
        )
    }
}

/// `∂_μβ − ω_μᵀβ − βω_μ` at one point.
pub fn compatibility_residual(bundle: &BundleData, x: &[f64], mu: usize) -> Result<DenseMatrix> {
    let beta = bundle.beta_at(x)?;
    let omega = bundle.omega_at(mu, x)?;
    let d = bundle.beta_derivative_at(mu, x)?;
    Ok(&(&d - &(&omega.transpose() * &beta)) - &(&beta * &omega))
}

/// Max Frobenius norm of the residual over `grid` and all directions.
pub fn check_compatibility(bundle: &BundleData, grid: &[Vec<f64>], tol: f64) -> Result<CompatibilityReport> {
    let mut report = CompatibilityReport {
        max_residual: 0.0,
        worst_point: grid.first().cloned().unwrap_or_default(),
        worst_direction: 0,
        tolerance: tol,
        samples: grid.len(),
    };
    for x in grid {
        for mu in 0..bundle.dim() {
            let r = compatibility_residual(bundle, x, mu)?.frobenius_norm();
            if r > report.max_residual {
                report.max_residual = r;
                report.worst_point = x.clone();
                report.worst_direction = mu;
            }
        }
    }
    Ok(report)
}
