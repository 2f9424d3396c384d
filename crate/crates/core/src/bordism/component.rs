use std::fmt;

use crate::bundle::PathData;
use crate::error::{Error, Result};
use crate::numerics::{Assignment, SmoothExpr, Var};

use super::cut::{CutFamily, Piece, Window};

/// Parameter margin added on both sides of the outermost cut of a standard
/// component.
pub const STANDARD_MARGIN: f64 = 1.0;

/// Half-width of an elbow's parameter window, relative to `b − a`.
pub const ELBOW_WINDOW: f64 = 0.6;

/// Default width of the neighborhood around the core on which two
/// presentations are compared.
pub const DEFAULT_NEIGHBORHOOD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Unoriented,
    /// Agrees with increasing `t`.
    Positive,
    /// Opposite to increasing `t`.
    Negative,
}

impl Orientation {
    pub fn sign(self) -> Option<f64> {
        match self {
            Orientation::Unoriented => None,
            Orientation::Positive => Some(1.0),
            Orientation::Negative => Some(-1.0),
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::Unoriented => Orientation::Unoriented,
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

/// Sign of an oriented boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointSign {
    Positive,
    Negative,
}

impl fmt::Display for PointSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointSign::Positive => "+",
            PointSign::Negative => "-",
        })
    }
}

/// A connected component: a path `γ`, its cut functions `ρ_0..ρ_n` in
/// `(t, s)`, the parameter window it lives on and an orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub path: PathData,
    pub cuts: Vec<SmoothExpr>,
    pub window: Window,
    pub orientation: Orientation,
    /// Width of the core neighborhood on which the germ is compared.
    pub neighborhood: f64,
}

fn require_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{what} must be finite")))
    }
}

impl Component {
    /// Standard component `(γ; τ_0, …, τ_n)` with `ρ_a = t − τ_a`.
    pub fn standard(path: PathData, taus: &[f64]) -> Result<Self> {
        require_finite(taus, "cut positions")?;
        if taus.is_empty() {
            return Err(Error::Precondition(
                "a standard component needs at least one cut".into(),
            ));
        }
        if let Some(w) = taus.windows(2).find(|w| w[0] > w[1]) {
            return Err(Error::Invariant(format!(
                "cut ordering: τ positions must be nondecreasing, got {} before {}",
                w[0], w[1]
            )));
        }
        let lo = taus[0] - STANDARD_MARGIN;
        let hi = taus[taus.len() - 1] + STANDARD_MARGIN;
        let cuts = taus
            .iter()
            .map(|&tau| SmoothExpr::t() - SmoothExpr::constant(tau))
            .collect();
        Ok(Self::general(path, cuts, Window::Interval(lo, hi)))
    }

    /// Standard component whose cut positions `τ_a(s)` depend on the family
    /// parameter; the window covers all `fibers`.
    pub fn standard_family(path: PathData, taus: Vec<SmoothExpr>, fibers: &[f64]) -> Result<Self> {
        if taus.is_empty() {
            return Err(Error::Precondition(
                "a standard component needs at least one cut".into(),
            ));
        }
        for tau in &taus {
            if tau.depends_on(Var::T) {
                return Err(Error::Precondition(format!("cut position `{tau}` may not depend on t")));
            }
        }
        let samples: Vec<Option<f64>> = if fibers.is_empty() {
            vec![None]
        } else {
            fibers.iter().map(|&s| Some(s)).collect()
        };
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in samples {
            let at = match s {
                Some(s) => Assignment::new().with_s(s),
                None => Assignment::new(),
            };
            let values = taus.iter().map(|tau| tau.eval(&at)).collect::<Result<Vec<_>>>()?;
            if let Some(w) = values.windows(2).find(|w| w[0] > w[1]) {
                return Err(Error::Invariant(format!(
                    "cut ordering: τ positions must be nondecreasing, got {} before {}{}",
                    w[0],
                    w[1],
                    s.map(|s| format!(" at s = {s}")).unwrap_or_default()
                )));
            }
            lo = lo.min(values[0]);
            hi = hi.max(values[values.len() - 1]);
        }
        let cuts = taus.iter().map(|tau| SmoothExpr::t() - tau.clone()).collect();
        Ok(Self::general(
            path,
            cuts,
            Window::Interval(lo - STANDARD_MARGIN, hi + STANDARD_MARGIN),
        ))
    }

    /// Right elbow on `[a, b]`: two incoming points, no outgoing ones.
    /// `ρ_0 = (t − a)(b − t)`, `ρ_1 ≡ −(b − a)²/4`.
    pub fn right_elbow(path: PathData, a: f64, b: f64) -> Result<Self> {
        require_finite(&[a, b], "elbow endpoints")?;
        if !(a < b) {
            return Err(Error::Precondition(format!(
                "a < b required for an elbow, got a = {a}, b = {b}"
            )));
        }
        let t = SmoothExpr::t();
        let rho0 = (t.clone() - a) * (SmoothExpr::constant(b) - t);
        let rho1 = SmoothExpr::constant(-0.25 * (b - a) * (b - a));
        Ok(Self::general(path, vec![rho0, rho1], elbow_window(a, b)))
    }

    /// Left elbow on `[a, b]`: no incoming points, two outgoing ones.
    /// `ρ_0 ≡ (b − a)²/4`, `ρ_1 = (t − a)(t − b)`.
    pub fn left_elbow(path: PathData, a: f64, b: f64) -> Result<Self> {
        require_finite(&[a, b], "elbow endpoints")?;
        if !(a < b) {
            return Err(Error::Precondition(format!(
                "a < b required for an elbow, got a = {a}, b = {b}"
            )));
        }
        let t = SmoothExpr::t();
        let rho0 = SmoothExpr::constant(0.25 * (b - a) * (b - a));
        let rho1 = (t.clone() - a) * (t - b);
        Ok(Self::general(path, vec![rho0, rho1], elbow_window(a, b)))
    }

    /// Closed component on a periodic path; `ρ_0 ≡ 1`, `ρ_1 ≡ −1`.
    pub fn circle(path: PathData) -> Result<Self> {
        let period = path
            .period()
            .ok_or_else(|| Error::Precondition("a circle needs a periodic path".into()))?;
        Ok(Self::general(
            path,
            vec![SmoothExpr::one(), SmoothExpr::constant(-1.0)],
            Window::Periodic(period),
        ))
    }

    /// Arbitrary cut functions on an explicit window.
    pub fn general(path: PathData, cuts: Vec<SmoothExpr>, window: Window) -> Self {
        Self {
            path,
            cuts,
            window,
            orientation: Orientation::Unoriented,
            neighborhood: DEFAULT_NEIGHBORHOOD,
        }
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn with_neighborhood(mut self, eps: f64) -> Self {
        self.neighborhood = eps;
        self
    }

    pub fn levels(&self) -> usize {
        self.cuts.len()
    }

    pub fn depends_on_s(&self) -> bool {
        self.path.depends_on_s() || self.cuts.iter().any(|c| c.depends_on(Var::S))
    }

    /// Cut positions `τ_a` when every cut is of the form `t − τ_a` with `τ_a`
    /// independent of `t`.
    pub fn standard_positions(&self) -> Option<Vec<SmoothExpr>> {
        self.cuts
            .iter()
            .map(|c| {
                // slope identically 1 means c − t does not depend on t
                (c.differentiate(Var::T).as_const() == Some(1.0)).then(|| -c.bind(Var::T, 0.0))
            })
            .collect()
    }

    /// Restriction to the fiber over `s`.
    pub fn at_fiber(&self, s: f64) -> Component {
        Component {
            path: self.path.at_fiber(s),
            cuts: self.cuts.iter().map(|c| c.bind(Var::S, s)).collect(),
            ..self.clone()
        }
    }

    pub fn cut_family(&self) -> CutFamily {
        CutFamily::new(self.cuts.clone())
    }

    pub fn validate(&self) -> Result<()> {
        if self.depends_on_s() {
            return Err(Error::Precondition(
                "component depends on s; validate fibers individually".into(),
            ));
        }
        if let Window::Interval(lo, hi) = self.window {
            if !(lo < hi) {
                return Err(Error::Precondition(format!("empty parameter window ({lo}, {hi})")));
            }
        }
        if self.window.is_periodic() && self.path.period().is_none() {
            return Err(Error::Precondition("periodic window on a non-periodic path".into()));
        }
        self.cut_family().validate(self.window)
    }

    /// Sign of `∂_t ρ_a` at each zero of `ρ_a`, times the orientation.
    pub fn point_signs(&self, a: usize) -> Result<Vec<(f64, PointSign)>> {
        let sign = self
            .orientation
            .sign()
            .ok_or_else(|| Error::Precondition("point signs need an oriented component".into()))?;
        let cuts = self.cut_family();
        cuts.zeros(a, self.window)?
            .into_iter()
            .map(|t| {
                let d = cuts.slope(a, t)? * sign;
                Ok((
                    t,
                    if d > 0.0 {
                        PointSign::Positive
                    } else {
                        PointSign::Negative
                    },
                ))
            })
            .collect()
    }
}

fn elbow_window(a: f64, b: f64) -> Window {
    let m = 0.5 * (a + b);
    let w = ELBOW_WINDOW * (b - a);
    Window::Interval(m - w, m + w)
}

/// A (possibly disconnected) bordism: components sharing the same number of
/// cut functions. Components may depend on the family parameter `s`; see
/// [`Family`].
#[derive(Debug, Clone, PartialEq)]
pub struct Bordism {
    pub components: Vec<Component>,
}

/// A core piece tagged with its component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoreInterval {
    pub component: usize,
    pub piece: Piece,
}

impl Bordism {
    /// Validates every component (fibers are validated by [`Family`]).
    pub fn new(components: Vec<Component>) -> Result<Self> {
        let b = Self::unchecked(components)?;
        if !b.depends_on_s() {
            b.validate()?;
        }
        Ok(b)
    }

    /// Only checks that all components have the same number of cuts.
    pub fn unchecked(components: Vec<Component>) -> Result<Self> {
        if let Some(first) = components.first() {
            if let Some(c) = components.iter().find(|c| c.levels() != first.levels()) {
                return Err(Error::Precondition(format!(
                    "components carry {} and {} cut functions",
                    first.levels(),
                    c.levels()
                )));
            }
        }
        Ok(Self { components })
    }

    pub fn single(component: Component) -> Result<Self> {
        Self::new(vec![component])
    }

    /// Number of cut functions per component (`n + 1`), 0 if empty.
    pub fn levels(&self) -> usize {
        self.components.first().map_or(0, |c| c.levels())
    }

    pub fn depends_on_s(&self) -> bool {
        self.components.iter().any(|c| c.depends_on_s())
    }

    pub fn validate(&self) -> Result<()> {
        for (k, c) in self.components.iter().enumerate() {
            c.validate().map_err(|e| match e {
                Error::Invariant(msg) => Error::Invariant(format!("component {k}: {msg}")),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn at_fiber(&self, s: f64) -> Bordism {
        Bordism {
            components: self.components.iter().map(|c| c.at_fiber(s)).collect(),
        }
    }

    /// `b1 ⊔ b2`, components of `b1` first.
    pub fn disjoint_union(&self, other: &Bordism) -> Result<Bordism> {
        if !self.components.is_empty() && !other.components.is_empty() && self.levels() != other.levels() {
            return Err(Error::Precondition(format!(
                "disjoint union of bordisms with {} and {} cut functions",
                self.levels(),
                other.levels()
            )));
        }
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        Ok(Bordism { components })
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        for c in &mut self.components {
            c.orientation = orientation;
        }
        self
    }
}

/// `X_a^c` of a bordism on one fiber, pieces sorted by (component, t).
pub fn core_intervals(b: &Bordism, a: usize, c: usize) -> Result<Vec<CoreInterval>> {
    let mut out = Vec::new();
    for (k, comp) in b.components.iter().enumerate() {
        for piece in comp.cut_family().core(a, c, comp.window)? {
            out.push(CoreInterval { component: k, piece });
        }
    }
    Ok(out)
}

/// Signs of the points of `X_a^a`, sorted by (component, t).
pub fn point_signs(b: &Bordism, a: usize) -> Result<Vec<PointSign>> {
    let mut out = Vec::new();
    for c in &b.components {
        out.extend(c.point_signs(a)?.into_iter().map(|(_, s)| s));
    }
    Ok(out)
}

/// Re-indexes the cut list along an order-preserving `κ: [m] → [n]`,
/// given as `κ(0), …, κ(m)`.
pub fn simplicial_map(b: &Bordism, kappa: &[usize]) -> Result<Bordism> {
    if kappa.is_empty() {
        return Err(Error::Precondition("κ must have a nonempty domain".into()));
    }
    if let Some(w) = kappa.windows(2).find(|w| w[0] > w[1]) {
        return Err(Error::Precondition(format!(
            "κ must be order-preserving, got {} before {}",
            w[0], w[1]
        )));
    }
    let n = b.levels();
    if let Some(&k) = kappa.iter().find(|&&k| k >= n) {
        return Err(Error::Precondition(format!(
            "κ value {k} exceeds the top index {}",
            n.saturating_sub(1)
        )));
    }
    let components = b
        .components
        .iter()
        .map(|c| Component {
            cuts: kappa.iter().map(|&k| c.cuts[k].clone()).collect(),
            ..c.clone()
        })
        .collect();
    Ok(Bordism { components })
}

/// A family of bordisms over a finite grid of parameter values `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub fibers: Vec<(f64, Bordism)>,
}

impl Family {
    /// Restricts an `s`-dependent bordism to each grid value and validates
    /// every fiber.
    pub fn from_bordism(b: &Bordism, grid: &[f64]) -> Result<Self> {
        let fibers = grid
            .iter()
            .map(|&s| {
                let f = b.at_fiber(s);
                f.validate().map_err(|e| match e {
                    Error::Invariant(msg) => Error::Invariant(format!("fiber s = {s}: {msg}")),
                    other => other,
                })?;
                Ok((s, f))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { fibers })
    }

    /// Evenly spaced grid with `count` points on `[lo, hi]`.
    pub fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
        match count {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..count)
                .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
                .collect(),
        }
    }

    pub fn parameters(&self) -> Vec<f64> {
        self.fibers.iter().map(|(s, _)| *s).collect()
    }

    pub fn fiber(&self, s: f64) -> Option<&Bordism> {
        self.fibers.iter().find(|(x, _)| *x == s).map(|(_, b)| b)
    }
}
