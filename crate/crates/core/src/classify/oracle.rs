use crate::bordism::{Bordism, Component, Orientation};
use crate::bundle::{DomainBox, PathData};
use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;
use crate::tft::{evaluate, evaluate_oriented, Primitives, TftData};

/// A field theory seen only through queries.
pub trait TftOracle: Send + Sync {
    /// Fiber dimension at the universal point.
    fn rank(&self) -> usize;

    /// The box the theory lives over.
    fn domain(&self) -> &DomainBox;

    /// Value of the interval `(γ; a, b)`, `a ≤ b`.
    fn transport(&self, path: &PathData, a: f64, b: f64) -> Result<DenseMatrix>;

    /// Constant right elbow at `x`, as the `n×n` matrix of a bilinear map.
    fn right_elbow(&self, x: &[f64]) -> Result<DenseMatrix>;

    /// Constant left elbow at `x`, as the `n×n` matrix of an element of `V ⊗ V`.
    fn left_elbow(&self, x: &[f64]) -> Result<DenseMatrix>;

    /// Value of a circle on a periodic path.
    fn circle(&self, loop_path: &PathData) -> Result<f64>;

    /// Whether elbow queries are answered.
    fn has_elbows(&self) -> bool {
        true
    }
}

/// Oracle answering every query by evaluating the corresponding bordism.
#[derive(Debug, Clone)]
pub struct TftBackedOracle {
    data: TftData,
    oriented: bool,
}

impl TftBackedOracle {
    pub fn new(data: TftData) -> Self {
        Self { data, oriented: false }
    }

    /// Oriented theory: intervals and circles only, no elbows.
    pub fn oriented(data: TftData) -> Self {
        Self { data, oriented: true }
    }

    pub fn data(&self) -> &TftData {
        &self.data
    }

    fn eval(&self, c: Component) -> Result<DenseMatrix> {
        let b = Bordism::single(c)?;
        let v = if self.oriented {
            evaluate_oriented(&self.data, &b.with_orientation(Orientation::Positive))?
        } else {
            evaluate(&self.data, &b)?
        };
        Ok(v.matrix)
    }

    fn no_elbows(&self) -> Error {
        Error::Oracle("oriented theory has no elbow values".into())
    }
}

impl TftOracle for TftBackedOracle {
    fn rank(&self) -> usize {
        self.data.rank()
    }

    fn domain(&self) -> &DomainBox {
        self.data.bundle().domain()
    }

    fn transport(&self, path: &PathData, a: f64, b: f64) -> Result<DenseMatrix> {
        if a > b {
            return Err(Error::Oracle(format!("interval query needs a ≤ b, got [{a}, {b}]")));
        }
        self.eval(Component::standard(path.clone(), &[a, b])?)
    }

    fn right_elbow(&self, x: &[f64]) -> Result<DenseMatrix> {
        if self.oriented {
            return Err(self.no_elbows());
        }
        let row = self.eval(Component::right_elbow(PathData::constant(x), 0.0, 1.0)?)?;
        let n = self.rank();
        Ok(DenseMatrix::from_vec(n, n, row.as_slice().to_vec()))
    }

    fn left_elbow(&self, x: &[f64]) -> Result<DenseMatrix> {
        if self.oriented {
            return Err(self.no_elbows());
        }
        let col = self.eval(Component::left_elbow(PathData::constant(x), 0.0, 1.0)?)?;
        let n = self.rank();
        Ok(DenseMatrix::from_vec(n, n, col.as_slice().to_vec()))
    }

    fn circle(&self, loop_path: &PathData) -> Result<f64> {
        let v = self.eval(Component::circle(loop_path.clone())?)?;
        Ok(v[(0, 0)])
    }

    fn has_elbows(&self) -> bool {
        !self.oriented
    }
}

/// Negative control: transports over parameter intervals containing
/// `window` come back as zero.
pub struct ZeroTransportOracle<O> {
    pub inner: O,
    pub window: (f64, f64),
}

impl<O: TftOracle> TftOracle for ZeroTransportOracle<O> {
    fn rank(&self) -> usize {
        self.inner.rank()
    }
    fn domain(&self) -> &DomainBox {
        self.inner.domain()
    }
    fn transport(&self, path: &PathData, a: f64, b: f64) -> Result<DenseMatrix> {
        if a <= self.window.0 && self.window.1 <= b {
            Ok(DenseMatrix::zeros(self.rank(), self.rank()))
        } else {
            self.inner.transport(path, a, b)
        }
    }
    fn right_elbow(&self, x: &[f64]) -> Result<DenseMatrix> {
        self.inner.right_elbow(x)
    }
    fn left_elbow(&self, x: &[f64]) -> Result<DenseMatrix> {
        self.inner.left_elbow(x)
    }
    fn circle(&self, loop_path: &PathData) -> Result<f64> {
        self.inner.circle(loop_path)
    }
    fn has_elbows(&self) -> bool {
        self.inner.has_elbows()
    }
}

/// Negative control: adds `strength·|γ(b) − γ(a)|²` to every entry of a
/// transport. Constant paths are unaffected, composition is not.
pub struct CompositionBugOracle<O> {
    pub inner: O,
    pub strength: f64,
}

impl<O: TftOracle> TftOracle for CompositionBugOracle<O> {
    fn rank(&self) -> usize {
        self.inner.rank()
    }
    fn domain(&self) -> &DomainBox {
        self.inner.domain()
    }
    fn transport(&self, path: &PathData, a: f64, b: f64) -> Result<DenseMatrix> {
        let p = self.inner.transport(path, a, b)?;
        let (xa, xb) = (path.point(a)?, path.point(b)?);
        let d2: f64 = xa.iter().zip(&xb).map(|(u, v)| (u - v) * (u - v)).sum();
        let n = self.rank();
        Ok(&p + &DenseMatrix::from_fn(n, n, |_, _| self.strength * d2))
    }
    fn right_elbow(&self, x: &[f64]) -> Result<DenseMatrix> {
        self.inner.right_elbow(x)
    }
    fn left_elbow(&self, x: &[f64]) -> Result<DenseMatrix> {
        self.inner.left_elbow(x)
    }
    fn circle(&self, loop_path: &PathData) -> Result<f64> {
        self.inner.circle(loop_path)
    }
    fn has_elbows(&self) -> bool {
        self.inner.has_elbows()
    }
}

/// Evaluates bordisms through oracle queries only.
pub struct OracleEvaluator<'a> {
    pub oracle: &'a dyn TftOracle,
}

impl Primitives for OracleEvaluator<'_> {
    fn rank(&self) -> usize {
        self.oracle.rank()
    }

    fn transport(&self, path: &PathData, from: f64, to: f64) -> Result<DenseMatrix> {
        if from <= to {
            self.oracle.transport(path, from, to)
        } else {
            self.oracle.transport(&path.reversed(), -from, -to)
        }
    }

    fn pairing(&self, x: &[f64]) -> Result<DenseMatrix> {
        self.oracle.right_elbow(x)
    }

    fn copairing(&self, x: &[f64]) -> Result<DenseMatrix> {
        self.oracle.left_elbow(x)
    }

    fn circle_trace(&self, path: &PathData, reversed: bool) -> Result<f64> {
        if reversed {
            self.oracle.circle(&path.reversed())
        } else {
            self.oracle.circle(path)
        }
    }
}
