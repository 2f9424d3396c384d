use crate::bundle::{
    check_compatibility, coevaluation, holonomy_with_rtol, parallel_transport_with_rtol, BundleData,
    CompatibilityReport, PathData, COMPATIBILITY_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, DEFAULT_RTOL};

/// Samples per axis of the compatibility scan.
pub const COMPATIBILITY_SAMPLES: usize = 5;

/// The values a field theory assigns to its building blocks. Evaluation of
/// arbitrary bordisms reduces to these.
pub trait Primitives {
    /// Fiber dimension `n`.
    fn rank(&self) -> usize;

    /// Transport along `path` from parameter `from` to `to`.
    fn transport(&self, path: &PathData, from: f64, to: f64) -> Result<DenseMatrix>;

    /// The bilinear form at `x` (value of a constant right elbow).
    fn pairing(&self, x: &[f64]) -> Result<DenseMatrix>;

    /// The copairing `τ` at `x` (value of a constant left elbow).
    fn copairing(&self, x: &[f64]) -> Result<DenseMatrix>;

    /// Trace of the holonomy once around `path`, against `t` if `reversed`.
    fn circle_trace(&self, path: &PathData, reversed: bool) -> Result<f64>;
}

/// The field theory of a bundle with connection and bilinear form.
#[derive(Debug, Clone)]
pub struct TftData {
    bundle: BundleData,
    rtol: f64,
    compatibility: CompatibilityReport,
}

impl TftData {
    /// Requires compatibility at [`COMPATIBILITY_TOLERANCE`].
    pub fn new(bundle: BundleData) -> Result<Self> {
        Self::with_tolerance(bundle, COMPATIBILITY_TOLERANCE)
    }

    /// Requires compatibility at `tol`.
    pub fn with_tolerance(bundle: BundleData, tol: f64) -> Result<Self> {
        let data = Self::unchecked(bundle, tol)?;
        if !data.compatibility.passed() {
            return Err(Error::Invariant(format!(
                "connection and bilinear form are not compatible: {}",
                data.compatibility
            )));
        }
        Ok(data)
    }

    /// Records the compatibility scan without enforcing it. Unoriented
    /// evaluation of such data fails unless the scan passed; the oriented
    /// functor and the diagnostics still work.
    pub fn unchecked(bundle: BundleData, tol: f64) -> Result<Self> {
        let grid = bundle.domain().grid(COMPATIBILITY_SAMPLES);
        let compatibility = check_compatibility(&bundle, &grid, tol)?;
        Ok(Self {
            bundle,
            rtol: DEFAULT_RTOL,
            compatibility,
        })
    }

    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.rtol = rtol;
        self
    }

    pub fn bundle(&self) -> &BundleData {
        &self.bundle
    }

    pub fn rtol(&self) -> f64 {
        self.rtol
    }

    pub fn compatibility(&self) -> &CompatibilityReport {
        &self.compatibility
    }

    pub fn is_compatible(&self) -> bool {
        self.compatibility.passed()
    }
}

impl Primitives for TftData {
    fn rank(&self) -> usize {
        self.bundle.rank()
    }

    fn transport(&self, path: &PathData, from: f64, to: f64) -> Result<DenseMatrix> {
        parallel_transport_with_rtol(&self.bundle, path, from, to, self.rtol)
    }

    fn pairing(&self, x: &[f64]) -> Result<DenseMatrix> {
        self.bundle.beta_at(x)
    }

    fn copairing(&self, x: &[f64]) -> Result<DenseMatrix> {
        coevaluation(&self.bundle, x)
    }

    fn circle_trace(&self, path: &PathData, reversed: bool) -> Result<f64> {
        let h = holonomy_with_rtol(&self.bundle, path, self.rtol)?;
        if reversed {
            Ok(h.inverse()?.trace())
        } else {
            Ok(h.trace())
        }
    }
}
