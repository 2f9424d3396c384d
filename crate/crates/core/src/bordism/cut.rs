//! Cut functions and their cores on a single fiber.

use crate::error::{Error, Result};
use crate::numerics::{roots, Assignment, SmoothExpr, Var};

/// `|∂_t ρ|` at a zero must exceed this.
pub const TRANSVERSALITY_THRESHOLD: f64 = 1e-8;

/// Slack in the ordering check `ρ_a ≥ ρ_{a+1}`.
pub const ORDERING_TOLERANCE: f64 = 1e-12;

/// Minimum number of samples per fiber in invariant scans.
pub const MIN_SCAN_POINTS: usize = 200;

/// Parameter range of a connected component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    /// The open interval `(lo, hi)`; cores must stay strictly inside.
    Interval(f64, f64),
    /// A circle `ℝ / period·ℤ`, represented by `[0, period)`.
    Periodic(f64),
}

impl Window {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Window::Interval(lo, hi) => (lo, hi),
            Window::Periodic(p) => (0.0, p),
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Window::Periodic(_))
    }

    /// Evenly spaced scan points, at least [`MIN_SCAN_POINTS`] and 200 per unit.
    pub fn scan_points(&self) -> Vec<f64> {
        let (lo, hi) = self.bounds();
        let k = ((hi - lo) * roots::SCAN_DENSITY).ceil().max(MIN_SCAN_POINTS as f64) as usize;
        (0..=k).map(|i| lo + (hi - lo) * i as f64 / k as f64).collect()
    }
}

/// A connected piece of a core: `[lo, hi]`, a single point when
/// `lo == hi`, or the whole circle when `closed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub closed: bool,
}

impl Piece {
    pub fn is_point(&self) -> bool {
        !self.closed && self.lo == self.hi
    }
}

/// Cut functions `ρ_0 ≥ … ≥ ρ_n` in `t` on one fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct CutFamily {
    pub cuts: Vec<SmoothExpr>,
}

fn at(t: f64) -> Assignment {
    Assignment::new().with_t(t)
}

impl CutFamily {
    pub fn new(cuts: Vec<SmoothExpr>) -> Self {
        Self { cuts }
    }

    /// Number of cut functions, `n + 1`.
    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn value(&self, a: usize, t: f64) -> Result<f64> {
        self.cuts[a].eval(&at(t))
    }

    pub fn slope(&self, a: usize, t: f64) -> Result<f64> {
        self.cuts[a].differentiate(Var::T).eval(&at(t))
    }

    /// Zeros of `ρ_a` inside the window, each checked for transversality.
    pub fn zeros(&self, a: usize, window: Window) -> Result<Vec<f64>> {
        let rho = &self.cuts[a];
        let d = rho.differentiate(Var::T);
        let (lo, hi) = window.bounds();
        let found = match d.as_const() {
            // linear in t: exact root
            Some(k) if k != 0.0 => {
                let r = -rho.eval(&at(0.0))? / k;
                if r > lo && r < hi {
                    vec![r]
                } else {
                    Vec::new()
                }
            }
            _ => roots::find_roots(|t| rho.eval(&at(t)), lo, hi)?,
        };
        for &r in &found {
            let slope = d.eval(&at(r))?;
            if !(slope.abs() > TRANSVERSALITY_THRESHOLD) {
                return Err(Error::Invariant(format!(
                    "transversality: dρ_{a} vanishes at its zero t = {r} (|∂_t ρ_{a}| = {:e})",
                    slope.abs()
                )));
            }
        }
        if window.is_periodic() && !found.is_empty() {
            return Err(Error::Invariant(format!(
                "closed component: cut ρ_{a} vanishes at t = {}; cuts on circles must not vanish",
                found[0]
            )));
        }
        Ok(found)
    }

    /// Checks ordering on the scan grid of `window`.
    pub fn check_ordering(&self, window: Window) -> Result<()> {
        for t in window.scan_points() {
            for a in 0..self.cuts.len().saturating_sub(1) {
                let hi = self.value(a, t)?;
                let lo = self.value(a + 1, t)?;
                if hi < lo - ORDERING_TOLERANCE * (1.0 + hi.abs().max(lo.abs())) {
                    return Err(Error::Invariant(format!(
                        "cut ordering: ρ_{a} ≥ ρ_{} fails at t = {t} ({hi} < {lo})",
                        a + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// The core `X_a^c = {ρ_a ≥ 0 ≥ ρ_c}` as sorted connected pieces.
    pub fn core(&self, a: usize, c: usize, window: Window) -> Result<Vec<Piece>> {
        if a > c || c >= self.cuts.len() {
            return Err(Error::Precondition(format!(
                "core indices need 0 ≤ a ≤ c ≤ {}, got a = {a}, c = {c}",
                self.cuts.len().saturating_sub(1)
            )));
        }
        let za = self.zeros(a, window)?;
        let zc = if a == c { za.clone() } else { self.zeros(c, window)? };
        let inside = |t: f64| -> Result<bool> { Ok(self.value(a, t)? >= 0.0 && self.value(c, t)? <= 0.0) };

        if let Window::Periodic(p) = window {
            return Ok(if inside(0.0)? {
                vec![Piece {
                    lo: 0.0,
                    hi: p,
                    closed: true,
                }]
            } else {
                Vec::new()
            });
        }

        let (lo, hi) = window.bounds();
        let mut breaks: Vec<f64> = za.iter().chain(&zc).copied().collect();
        breaks.push(lo);
        breaks.push(hi);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();

        let mut pieces: Vec<Piece> = Vec::new();
        for w in breaks.windows(2) {
            let (p, q) = (w[0], w[1]);
            if inside(0.5 * (p + q))? {
                if p == lo || q == hi {
                    return Err(Error::Invariant(format!(
                        "properness: core X_{a}^{c} reaches the end of the parameter window ({lo}, {hi})"
                    )));
                }
                match pieces.last_mut() {
                    Some(last) if last.hi == p => last.hi = q,
                    _ => pieces.push(Piece {
                        lo: p,
                        hi: q,
                        closed: false,
                    }),
                }
            }
        }
        // isolated points: zeros of ρ_a with ρ_c ≤ 0 there, or zeros of ρ_c with ρ_a ≥ 0
        let tiny = |v: f64| v.abs() <= 1e-12;
        let mut points: Vec<f64> = Vec::new();
        for &r in &za {
            let vc = self.value(c, r)?;
            if vc <= 0.0 || tiny(vc) {
                points.push(r);
            }
        }
        for &r in &zc {
            let va = self.value(a, r)?;
            if va >= 0.0 || tiny(va) {
                points.push(r);
            }
        }
        for r in points {
            if !pieces.iter().any(|p| p.lo <= r && r <= p.hi) {
                pieces.push(Piece {
                    lo: r,
                    hi: r,
                    closed: false,
                });
            }
        }
        pieces.sort_by(|x, y| x.lo.total_cmp(&y.lo));
        Ok(pieces)
    }

    /// Validates ordering, transversality and properness of all cores
    /// `X_a^a` and `X_a^{a+1}`.
    pub fn validate(&self, window: Window) -> Result<()> {
        if self.cuts.is_empty() {
            return Err(Error::Precondition(
                "a component needs at least one cut function".into(),
            ));
        }
        for c in &self.cuts {
            if let Some(v) = c.variables().into_iter().find(|v| *v != Var::T) {
                return Err(Error::Precondition(format!(
                    "cut function `{c}` still depends on `{v}` on a single fiber"
                )));
            }
        }
        self.check_ordering(window)?;
        for a in 0..self.cuts.len() {
            self.core(a, a, window)?;
            if a + 1 < self.cuts.len() {
                self.core(a, a + 1, window)?;
            }
        }
        Ok(())
    }
}
