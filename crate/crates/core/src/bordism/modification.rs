//! Modification functions: nondecreasing reparametrizations that sit still
//! near one or both ends of an interval.

use std::sync::Arc;

use crate::bundle::{PathData, Reparametrization};
use crate::error::{Error, Result};
use crate::numerics::quadrature::integrate_adaptive;
use crate::numerics::{Assignment, SmoothExpr};

use super::component::{Bordism, Component};

/// Samples in the monotonicity and flatness scan.
pub const SCAN_SAMPLES: usize = 1000;
/// Endpoint interpolation tolerance.
pub const ENDPOINT_TOLERANCE: f64 = 1e-10;
/// Absolute tolerance of each quadrature panel.
pub const QUADRATURE_TOLERANCE: f64 = 1e-15;
/// Default inset of the bump support, as a fraction of the interval.
pub const DEFAULT_INSET: f64 = 0.15;

const PANELS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModificationKind {
    /// Constant near both ends.
    TwoSided,
    /// Constant near `a`, the identity near `b`.
    Left,
    /// The identity near `a`, constant near `b`.
    Right,
}

impl ModificationKind {
    fn flat_at_a(self) -> bool {
        matches!(self, ModificationKind::TwoSided | ModificationKind::Left)
    }

    fn flat_at_b(self) -> bool {
        matches!(self, ModificationKind::TwoSided | ModificationKind::Right)
    }

    fn from_flags(a: bool, b: bool) -> Option<Self> {
        match (a, b) {
            (true, true) => Some(ModificationKind::TwoSided),
            (true, false) => Some(ModificationKind::Left),
            (false, true) => Some(ModificationKind::Right),
            (false, false) => None,
        }
    }
}

/// `exp(−1/(u(1 − u)))` with `u = (t − lo)/(hi − lo)`; evaluate on `(lo, hi)` only.
pub fn standard_bump(lo: f64, hi: f64) -> SmoothExpr {
    let u = (SmoothExpr::t() - lo) / (hi - lo);
    let denom = u.clone() * (SmoothExpr::one() - u);
    SmoothExpr::exp(&(SmoothExpr::constant(-1.0) / denom))
}

/// Cumulative integrals `G(t) = ∫_lo^t f` and `M(t) = ∫_lo^t u f(u) du`.
#[derive(Debug)]
struct Cumulative {
    f: SmoothExpr,
    lo: f64,
    hi: f64,
    edges: Vec<f64>,
    g: Vec<f64>,
    m: Vec<f64>,
}

impl Cumulative {
    fn new(f: SmoothExpr, lo: f64, hi: f64) -> Result<Self> {
        let edges: Vec<f64> = (0..=PANELS)
            .map(|k| {
                if k == PANELS {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / PANELS as f64
                }
            })
            .collect();
        let mut c = Self {
            f,
            lo,
            hi,
            edges,
            g: vec![0.0],
            m: vec![0.0],
        };
        for k in 0..PANELS {
            let (p, q) = (c.edges[k], c.edges[k + 1]);
            let dg = integrate_adaptive(|u| c.f_at(u), p, q, QUADRATURE_TOLERANCE)?;
            let dm = integrate_adaptive(|u| Ok(u * c.f_at(u)?), p, q, QUADRATURE_TOLERANCE)?;
            c.g.push(c.g[k] + dg);
            c.m.push(c.m[k] + dm);
        }
        Ok(c)
    }

    fn f_at(&self, t: f64) -> Result<f64> {
        if t <= self.lo || t >= self.hi {
            Ok(0.0)
        } else {
            self.f.eval(&Assignment::new().with_t(t))
        }
    }

    fn total(&self) -> (f64, f64) {
        (self.g[PANELS], self.m[PANELS])
    }

    fn at(&self, t: f64) -> Result<(f64, f64)> {
        if t <= self.lo {
            return Ok((0.0, 0.0));
        }
        if t >= self.hi {
            return Ok(self.total());
        }
        let k = (((t - self.lo) / (self.hi - self.lo) * PANELS as f64) as usize).min(PANELS - 1);
        let k = if self.edges[k] > t { k - 1 } else { k };
        let p = self.edges[k];
        let dg = integrate_adaptive(|u| self.f_at(u), p, t, QUADRATURE_TOLERANCE)?;
        let dm = integrate_adaptive(|u| Ok(u * self.f_at(u)?), p, t, QUADRATURE_TOLERANCE)?;
        Ok((self.g[k] + dg, self.m[k] + dm))
    }
}

/// A modification function built from one bump.
#[derive(Debug)]
struct BumpModification {
    kind: ModificationKind,
    a: f64,
    b: f64,
    cumulative: Cumulative,
    total: f64,
    mean: f64,
}

impl Reparametrization for BumpModification {
    fn value(&self, t: f64) -> Result<f64> {
        let (g, m) = self.cumulative.at(t)?;
        let (f, mu) = (self.total, self.mean);
        Ok(match self.kind {
            ModificationKind::TwoSided => {
                if g >= f {
                    self.b
                } else {
                    self.a + (self.b - self.a) * g / f
                }
            }
            ModificationKind::Left => {
                if g >= f {
                    t
                } else {
                    self.a + (mu - self.a) * g / f + (t * g - m) / f
                }
            }
            ModificationKind::Right => {
                if g <= 0.0 {
                    t
                } else {
                    let (h, n) = (f - g, self.mean * f - m);
                    self.b - (self.b - mu) * h / f - (n - t * h) / f
                }
            }
        })
    }

    fn derivative(&self, t: f64) -> Result<f64> {
        let ft = self.cumulative.f_at(t)?;
        let (f, mu) = (self.total, self.mean);
        Ok(match self.kind {
            ModificationKind::TwoSided => (self.b - self.a) * ft / f,
            ModificationKind::Left => {
                let (g, _) = self.cumulative.at(t)?;
                (mu - self.a) * ft / f + g / f
            }
            ModificationKind::Right => {
                let (g, _) = self.cumulative.at(t)?;
                (self.b - mu) * ft / f + (f - g) / f
            }
        })
    }
}

/// A modification function `χ` on `[a, b]`.
#[derive(Debug, Clone)]
pub struct ModificationFn {
    pub kind: ModificationKind,
    pub a: f64,
    pub b: f64,
    /// `χ` is constant (or the identity) on `[a, a + margin_a]`.
    pub margin_a: f64,
    /// `χ` is constant (or the identity) on `[b − margin_b, b]`.
    pub margin_b: f64,
    map: Arc<dyn Reparametrization>,
}

impl Reparametrization for ModificationFn {
    fn value(&self, t: f64) -> Result<f64> {
        self.map.value(t)
    }

    fn derivative(&self, t: f64) -> Result<f64> {
        self.map.derivative(t)
    }
}

/// Builds a modification function of the given kind on `[a, b]` from a
/// bump `f ≥ 0` supported in `[lo, hi] ⊂ (a, b)`.
pub fn build_modification(
    kind: ModificationKind,
    a: f64,
    b: f64,
    f: &SmoothExpr,
    support: (f64, f64),
) -> Result<ModificationFn> {
    let (lo, hi) = support;
    if !(a < lo && lo < hi && hi < b) {
        return Err(Error::Precondition(format!(
            "bump support [{lo}, {hi}] must lie strictly inside ({a}, {b})"
        )));
    }
    if let Some(v) = f.variables().into_iter().find(|v| *v != crate::numerics::Var::T) {
        return Err(Error::Precondition(format!("bump may only depend on t, found `{v}`")));
    }
    let cumulative = Cumulative::new(f.clone(), lo, hi)?;
    for k in 1..SCAN_SAMPLES {
        let t = lo + (hi - lo) * k as f64 / SCAN_SAMPLES as f64;
        let v = cumulative.f_at(t)?;
        if v < 0.0 {
            return Err(Error::Precondition(format!("bump is negative at t = {t} ({v})")));
        }
    }
    let (total, moment) = cumulative.total();
    if !(total > 0.0) {
        return Err(Error::Construction(format!(
            "bump vanishes identically on [{lo}, {hi}]"
        )));
    }
    let map = BumpModification {
        kind,
        a,
        b,
        cumulative,
        total,
        mean: moment / total,
    };
    Ok(ModificationFn {
        kind,
        a,
        b,
        margin_a: lo - a,
        margin_b: b - hi,
        map: Arc::new(map),
    })
}

/// Two-sided modification with the standard bump inset by `inset·(b − a)`.
pub fn standard_two_sided(a: f64, b: f64) -> Result<ModificationFn> {
    let w = DEFAULT_INSET * (b - a);
    build_modification(
        ModificationKind::TwoSided,
        a,
        b,
        &standard_bump(a + w, b - w),
        (a + w, b - w),
    )
}

impl ModificationFn {
    /// `self ∘ inner`, both on the same interval.
    pub fn compose(&self, inner: &ModificationFn) -> Result<ModificationFn> {
        if self.a != inner.a || self.b != inner.b {
            return Err(Error::Precondition(format!(
                "composing modification functions on [{}, {}] and [{}, {}]",
                self.a, self.b, inner.a, inner.b
            )));
        }
        let flat_a = inner.kind.flat_at_a() || self.kind.flat_at_a();
        let flat_b = inner.kind.flat_at_b() || self.kind.flat_at_b();
        let kind = ModificationKind::from_flags(flat_a, flat_b)
            .ok_or_else(|| Error::Construction("composite is not a modification function".into()))?;
        let margin = |inner_flat: bool, inner_m: f64, outer_m: f64| {
            if inner_flat {
                inner_m
            } else {
                inner_m.min(outer_m)
            }
        };
        Ok(ModificationFn {
            kind,
            a: self.a,
            b: self.b,
            margin_a: margin(inner.kind.flat_at_a(), inner.margin_a, self.margin_a),
            margin_b: margin(inner.kind.flat_at_b(), inner.margin_b, self.margin_b),
            map: Arc::new(crate::bundle::path::Composed {
                outer: self.map.clone(),
                inner: inner.map.clone(),
            }),
        })
    }

    /// Monotonicity, endpoint interpolation and flatness on a
    /// [`SCAN_SAMPLES`]-point grid.
    pub fn check_invariants(&self) -> Result<()> {
        let (a, b) = (self.a, self.b);
        for (end, target) in [(a, a), (b, b)] {
            let v = self.value(end)?;
            if (v - target).abs() > ENDPOINT_TOLERANCE {
                return Err(Error::Invariant(format!(
                    "modification function: χ({end}) = {v}, expected {target}"
                )));
            }
        }
        let mut prev = self.value(a)?;
        for k in 1..=SCAN_SAMPLES {
            let t = a + (b - a) * k as f64 / SCAN_SAMPLES as f64;
            let v = self.value(t)?;
            let d = self.derivative(t)?;
            if v < prev - 1e-14 * (1.0 + v.abs()) || d < -1e-14 {
                return Err(Error::Invariant(format!(
                    "modification function is not nondecreasing at t = {t}"
                )));
            }
            prev = v;
            let near_a = t - a <= self.margin_a;
            let near_b = b - t <= self.margin_b;
            let expect = if near_a {
                Some(if self.kind.flat_at_a() { (a, 0.0) } else { (t, 1.0) })
            } else if near_b {
                Some(if self.kind.flat_at_b() { (b, 0.0) } else { (t, 1.0) })
            } else {
                None
            };
            if let Some((value, slope)) = expect {
                if (v - value).abs() > ENDPOINT_TOLERANCE || (d - slope).abs() > ENDPOINT_TOLERANCE {
                    return Err(Error::Invariant(format!(
                        "modification function: expected χ = {value}, χ′ = {slope} near the end at t = {t}, got {v}, {d}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `χ` on `[τ_0, τ_n]`: a two-sided modification on every non-thin
/// `[τ_{j−1}, τ_j]`, constant outside.
#[derive(Debug)]
struct Piecewise {
    taus: Vec<f64>,
    pieces: Vec<Option<ModificationFn>>,
}

impl Piecewise {
    fn locate(&self, t: f64) -> Option<&ModificationFn> {
        self.pieces.iter().flatten().find(|m| m.a <= t && t <= m.b)
    }
}

impl Reparametrization for Piecewise {
    fn value(&self, t: f64) -> Result<f64> {
        let (first, last) = (self.taus[0], self.taus[self.taus.len() - 1]);
        if t <= first {
            return Ok(first);
        }
        if t >= last {
            return Ok(last);
        }
        match self.locate(t) {
            Some(m) => m.value(t),
            // inside a thin interval
            None => Ok(t),
        }
    }

    fn derivative(&self, t: f64) -> Result<f64> {
        let (first, last) = (self.taus[0], self.taus[self.taus.len() - 1]);
        if t <= first || t >= last {
            return Ok(0.0);
        }
        match self.locate(t) {
            Some(m) => m.derivative(t),
            None => Ok(0.0),
        }
    }
}

/// Replaces the path of every standard component by `γ ∘ χ`, where `χ` is
/// built by `make` on each non-thin interval `[τ_{j−1}, τ_j]`. The path
/// then sits still near each `τ_j`; cut data is unchanged.
pub fn insert_sitting_instants_with(
    b: &Bordism,
    make: &mut dyn FnMut(f64, f64) -> Result<ModificationFn>,
) -> Result<Bordism> {
    let mut components = Vec::with_capacity(b.components.len());
    for c in &b.components {
        let taus = c
            .standard_positions()
            .ok_or_else(|| Error::Precondition("sitting instants need a standard component".into()))?;
        let taus = taus
            .iter()
            .map(|tau| {
                tau.as_const().ok_or_else(|| {
                    Error::Precondition(
                        "sitting instants need fiberwise constant cut positions; restrict to a fiber first".into(),
                    )
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        let pieces = taus
            .windows(2)
            .map(|w| {
                if w[1] > w[0] {
                    make(w[0], w[1]).map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let path: PathData = if pieces.iter().all(|p| p.is_none()) {
            // thin or single cut: the path only matters at the cut points
            c.path.clone()
        } else {
            c.path.reparametrize(Arc::new(Piecewise { taus, pieces }))
        };
        components.push(Component { path, ..c.clone() });
    }
    Ok(Bordism { components })
}

/// [`insert_sitting_instants_with`] using [`standard_two_sided`].
pub fn insert_sitting_instants(b: &Bordism) -> Result<Bordism> {
    insert_sitting_instants_with(b, &mut |lo, hi| standard_two_sided(lo, hi))
}
