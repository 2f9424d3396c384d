use crate::error::{Error, Result};
use crate::numerics::{fundamental_solution, indefinite_orthonormalize, DenseMatrix, OdeProblem, DEFAULT_RTOL};

use super::data::BundleData;
use super::path::PathData;

fn check_dims(bundle: &BundleData, path: &PathData) -> Result<()> {
    if bundle.dim() != path.dim() {
        return Err(Error::Dimension(format!(
            "path lives in ℝ^{}, bundle base in ℝ^{}",
            path.dim(),
            bundle.dim()
        )));
    }
    Ok(())
}

/// `A(t) = Σ_μ ω_μ(γ(t)) γ̇^μ(t)`.
pub fn pullback_coefficient<'a>(
    bundle: &'a BundleData,
    path: &'a PathData,
) -> Result<impl Fn(f64) -> Result<DenseMatrix> + 'a> {
    check_dims(bundle, path)?;
    Ok(move |t: f64| {
        let x = path.point(t)?;
        if !bundle.domain().contains(&x) {
            return Err(Error::OutOfDomain { t, point: x });
        }
        let v = path.velocity(t)?;
        bundle.connection_at(&x, &v)
    })
}

/// Parallel transport along `γ` from `t = a` to `t = b`; solves
/// `u̇ = −A(t)u`. For `a > b` this is the inverse of the transport from `b`
/// to `a`.
pub fn parallel_transport(bundle: &BundleData, path: &PathData, a: f64, b: f64) -> Result<DenseMatrix> {
    parallel_transport_with_rtol(bundle, path, a, b, DEFAULT_RTOL)
}

pub fn parallel_transport_with_rtol(
    bundle: &BundleData,
    path: &PathData,
    a: f64,
    b: f64,
    rtol: f64,
) -> Result<DenseMatrix> {
    if a == b {
        // still validate the point itself
        let x = path.point(a)?;
        if !bundle.domain().contains(&x) {
            return Err(Error::OutOfDomain { t: a, point: x });
        }
        return Ok(DenseMatrix::identity(bundle.rank()));
    }
    let coefficient = pullback_coefficient(bundle, path)?;
    let problem = OdeProblem::new(|t| coefficient(t).map(|m| m.scale(-1.0)), a, b).with_rtol(rtol);
    match fundamental_solution(&problem) {
        Err(Error::Integration { t, reason }) => {
            // surface domain exits directly rather than as integration noise
            match coefficient(t) {
                Err(e @ Error::OutOfDomain { .. }) => Err(e),
                _ => Err(Error::Integration { t, reason }),
            }
        }
        other => other,
    }
}

/// Transport once around a loop, `[0, period]`.
pub fn holonomy(bundle: &BundleData, loop_path: &PathData) -> Result<DenseMatrix> {
    holonomy_with_rtol(bundle, loop_path, DEFAULT_RTOL)
}

pub fn holonomy_with_rtol(bundle: &BundleData, loop_path: &PathData, rtol: f64) -> Result<DenseMatrix> {
    let period = loop_path
        .period()
        .ok_or_else(|| Error::Precondition("holonomy needs a periodic path".into()))?;
    parallel_transport_with_rtol(bundle, loop_path, 0.0, period, rtol)
}

/// Trace of the holonomy.
pub fn holonomy_trace(bundle: &BundleData, loop_path: &PathData) -> Result<f64> {
    Ok(holonomy(bundle, loop_path)?.trace())
}

/// `τ = Σ ε_i b_i b_iᵀ` for a generalized orthonormal basis of `β(x)`.
pub fn coevaluation(bundle: &BundleData, x: &[f64]) -> Result<DenseMatrix> {
    Ok(indefinite_orthonormalize(&bundle.beta_at(x)?)?.coevaluation())
}
