use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{Assignment, SmoothExpr, Var};

/// Periodicity is checked at this many sample points.
pub const PERIODICITY_SAMPLES: usize = 20;
pub const PERIODICITY_TOLERANCE: f64 = 1e-10;

/// A numerically given reparametrization `t ↦ r(t)` with derivative.
pub trait Reparametrization: Send + Sync + fmt::Debug {
    fn value(&self, t: f64) -> Result<f64>;
    fn derivative(&self, t: f64) -> Result<f64>;
}

/// `r(t) = outer(inner(t))`.
#[derive(Debug, Clone)]
pub struct Composed {
    pub outer: Arc<dyn Reparametrization>,
    pub inner: Arc<dyn Reparametrization>,
}

impl Reparametrization for Composed {
    fn value(&self, t: f64) -> Result<f64> {
        self.outer.value(self.inner.value(t)?)
    }

    fn derivative(&self, t: f64) -> Result<f64> {
        let u = self.inner.value(t)?;
        Ok(self.outer.derivative(u)? * self.inner.derivative(t)?)
    }
}

/// `r(t) = offset + slope·t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub offset: f64,
    pub slope: f64,
}

impl Reparametrization for Affine {
    fn value(&self, t: f64) -> Result<f64> {
        Ok(self.offset + self.slope * t)
    }

    fn derivative(&self, _t: f64) -> Result<f64> {
        Ok(self.slope)
    }
}

/// Closed-form reparametrization in `t`.
#[derive(Debug, Clone)]
pub struct ExprReparametrization {
    value: SmoothExpr,
    derivative: SmoothExpr,
}

impl ExprReparametrization {
    pub fn new(value: SmoothExpr) -> Result<Self> {
        if let Some(v) = value.variables().into_iter().find(|v| *v != Var::T) {
            return Err(Error::Precondition(format!(
                "reparametrization may only depend on t, found `{v}`"
            )));
        }
        let derivative = value.differentiate(Var::T);
        Ok(Self { value, derivative })
    }

    pub fn expr(&self) -> &SmoothExpr {
        &self.value
    }
}

impl Reparametrization for ExprReparametrization {
    fn value(&self, t: f64) -> Result<f64> {
        self.value.eval(&Assignment::new().with_t(t))
    }

    fn derivative(&self, t: f64) -> Result<f64> {
        self.derivative.eval(&Assignment::new().with_t(t))
    }
}

/// A path `γ: ℝ → ℝ^m`, possibly depending on the family parameter `s`.
///
/// The point at time `t` is `γ(r(t))` when a numerical reparametrization
/// `r` is attached, otherwise `γ(t)`.
#[derive(Clone)]
pub struct PathData {
    components: Vec<SmoothExpr>,
    velocity: Vec<SmoothExpr>,
    period: Option<f64>,
    reparam: Option<Arc<dyn Reparametrization>>,
}

impl fmt::Debug for PathData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let comps: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        f.debug_struct("PathData")
            .field("components", &comps)
            .field("period", &self.period)
            .field("reparametrized", &self.reparam.is_some())
            .finish()
    }
}

impl PartialEq for PathData {
    fn eq(&self, other: &Self) -> bool {
        let same_reparam = match (&self.reparam, &other.reparam) {
            (None, None) => true,
            (Some(a), Some(b)) => Arc::ptr_eq(a, b),
            _ => false,
        };
        same_reparam && self.components == other.components && self.period == other.period
    }
}

impl PathData {
    /// Path with components `γ^μ` in `t` (and optionally `s`).
    pub fn new(components: Vec<SmoothExpr>) -> Result<Self> {
        if components.is_empty() || components.len() > 9 {
            return Err(Error::Dimension(format!(
                "a path needs 1..9 components, got {}",
                components.len()
            )));
        }
        if let Some((c, v)) = components.iter().find_map(|c| {
            c.variables()
                .into_iter()
                .find(|v| !matches!(v, Var::T | Var::S))
                .map(|v| (c, v))
        }) {
            return Err(Error::Precondition(format!(
                "path component `{c}` may only use t and s, found `{v}`"
            )));
        }
        let velocity = components.iter().map(|c| c.differentiate(Var::T)).collect();
        Ok(Self {
            components,
            velocity,
            period: None,
            reparam: None,
        })
    }

    /// Constant path at `x`.
    pub fn constant(x: &[f64]) -> Self {
        Self::new(x.iter().map(|&v| SmoothExpr::constant(v)).collect()).expect("constant path of valid dimension")
    }

    /// Straight line `x + t·v`.
    pub fn line(x: &[f64], v: &[f64]) -> Self {
        Self::new(
            x.iter()
                .zip(v)
                .map(|(&x0, &v0)| SmoothExpr::constant(x0) + SmoothExpr::t() * v0)
                .collect(),
        )
        .expect("line of valid dimension")
    }

    /// Declares the path periodic; checked at sample points (and per fiber
    /// grid value `s` if given).
    pub fn with_period(mut self, period: f64, fibers: &[f64]) -> Result<Self> {
        if !(period > 0.0) {
            return Err(Error::Precondition(format!("period must be positive, got {period}")));
        }
        self.period = Some(period);
        let fibers: Vec<Option<f64>> = if fibers.is_empty() {
            vec![None]
        } else {
            fibers.iter().map(|&s| Some(s)).collect()
        };
        for s in fibers {
            let fiber = match s {
                Some(s) => self.at_fiber(s),
                None => self.clone(),
            };
            for k in 0..PERIODICITY_SAMPLES {
                let t = period * k as f64 / PERIODICITY_SAMPLES as f64;
                let p0 = fiber.point(t)?;
                let p1 = fiber.point(t + period)?;
                let gap = p0.iter().zip(&p1).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                if gap > PERIODICITY_TOLERANCE {
                    return Err(Error::Invariant(format!(
                        "path is not {period}-periodic: γ({t}) and γ({}) differ by {gap:e}",
                        t + period
                    )));
                }
            }
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn components(&self) -> &[SmoothExpr] {
        &self.components
    }

    pub fn is_reparametrized(&self) -> bool {
        self.reparam.is_some()
    }

    pub fn depends_on_s(&self) -> bool {
        self.components.iter().any(|c| c.depends_on(Var::S))
    }

    fn inner_time(&self, t: f64) -> Result<(f64, f64)> {
        match &self.reparam {
            None => Ok((t, 1.0)),
            Some(r) => Ok((r.value(t)?, r.derivative(t)?)),
        }
    }

    pub fn point(&self, t: f64) -> Result<Vec<f64>> {
        let (u, _) = self.inner_time(t)?;
        let at = Assignment::new().with_t(u);
        self.components.iter().map(|c| c.eval(&at)).collect()
    }

    pub fn velocity(&self, t: f64) -> Result<Vec<f64>> {
        let (u, du) = self.inner_time(t)?;
        let at = Assignment::new().with_t(u);
        self.velocity.iter().map(|c| c.eval(&at).map(|v| v * du)).collect()
    }

    /// Restriction to the fiber over `s`.
    pub fn at_fiber(&self, s: f64) -> PathData {
        if !self.depends_on_s() {
            return self.clone();
        }
        let components = self.components.iter().map(|c| c.bind(Var::S, s)).collect();
        let velocity = self.velocity.iter().map(|c| c.bind(Var::S, s)).collect();
        PathData {
            components,
            velocity,
            period: self.period,
            reparam: self.reparam.clone(),
        }
    }

    /// Symbolic substitution `t ↦ F(t)` (`F` may use `t` and `s`).
    pub fn substitute_time(&self, f: &SmoothExpr) -> Result<PathData> {
        if self.reparam.is_some() {
            return Err(Error::Precondition(
                "symbolic substitution on a numerically reparametrized path".into(),
            ));
        }
        let mut out = PathData::new(self.components.iter().map(|c| c.substitute(Var::T, f)).collect())?;
        out.period = None;
        Ok(out)
    }

    /// `t ↦ γ(r(t))`.
    pub fn reparametrize(&self, r: Arc<dyn Reparametrization>) -> PathData {
        let reparam: Arc<dyn Reparametrization> = match &self.reparam {
            None => r,
            Some(old) => Arc::new(Composed {
                outer: old.clone(),
                inner: r,
            }),
        };
        PathData {
            components: self.components.clone(),
            velocity: self.velocity.clone(),
            period: None,
            reparam: Some(reparam),
        }
    }

    /// `(𝔰_{a,b}γ)(t) = γ(a + (b − a)t)`, exact when no numerical
    /// reparametrization is attached.
    pub fn rescale(&self, a: f64, b: f64) -> PathData {
        if self.reparam.is_some() {
            return self.reparametrize(Arc::new(Affine {
                offset: a,
                slope: b - a,
            }));
        }
        let f = SmoothExpr::constant(a) + SmoothExpr::t() * (b - a);
        let mut out = self.substitute_time(&f).expect("plain path substitution");
        if let Some(p) = self.period {
            if b != a {
                out.period = Some(p / (b - a).abs());
            }
        }
        out
    }

    /// `t ↦ γ(−t)`, keeping the period.
    pub fn reversed(&self) -> PathData {
        let mut out = if self.reparam.is_some() {
            self.reparametrize(Arc::new(Affine {
                offset: 0.0,
                slope: -1.0,
            }))
        } else {
            self.substitute_time(&(-SmoothExpr::t()))
                .expect("plain path substitution")
        };
        out.period = self.period;
        out
    }
}

/// `𝔰_{a,b}γ`.
pub fn cut_rescale(path: &PathData, a: f64, b: f64) -> Result<PathData> {
    if a > b {
        return Err(Error::Precondition(format!("cut_rescale needs a ≤ b, got [{a}, {b}]")));
    }
    Ok(path.rescale(a, b))
}
