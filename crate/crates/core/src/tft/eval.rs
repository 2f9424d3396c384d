//! Evaluation of bordisms by decomposing each level into core pieces.

use std::fmt;

use crate::bordism::{Bordism, Component, Family, Orientation, Piece, PointSign};
use crate::bundle::PathData;
use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

use super::data::{Primitives, TftData};

/// Tensor factor type of a boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorKind {
    /// The fiber `ℝ^n`.
    Vector,
    /// Its dual.
    Dual,
}

impl fmt::Display for FactorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FactorKind::Vector => "V",
            FactorKind::Dual => "V*",
        })
    }
}

/// A linear map between tensor products of fibers (and duals). Factors are
/// ordered by (component, t); the first factor is the most significant
/// index.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub domain: Vec<FactorKind>,
    pub codomain: Vec<FactorKind>,
    pub matrix: DenseMatrix,
}

impl EvalResult {
    pub fn is_scalar(&self) -> bool {
        self.domain.is_empty() && self.codomain.is_empty()
    }

    /// The value of a closed bordism.
    pub fn scalar(&self) -> Option<f64> {
        self.is_scalar().then(|| self.matrix[(0, 0)])
    }

    fn unit() -> Self {
        Self {
            domain: Vec::new(),
            codomain: Vec::new(),
            matrix: DenseMatrix::scalar(1.0),
        }
    }

    fn tensor(&self, other: &EvalResult) -> EvalResult {
        let mut domain = self.domain.clone();
        domain.extend(&other.domain);
        let mut codomain = self.codomain.clone();
        codomain.extend(&other.codomain);
        EvalResult {
            domain,
            codomain,
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    fn then(&self, next: &EvalResult) -> Result<EvalResult> {
        if self.codomain != next.domain {
            return Err(Error::Invariant(format!(
                "boundary types do not match between levels: {:?} vs {:?}",
                self.codomain, next.domain
            )));
        }
        Ok(EvalResult {
            domain: self.domain.clone(),
            codomain: next.codomain.clone(),
            matrix: next.matrix.try_mul(&self.matrix)?,
        })
    }

    fn identity(kinds: Vec<FactorKind>, n: usize) -> Self {
        let dim = n.pow(kinds.len() as u32);
        Self {
            domain: kinds.clone(),
            codomain: kinds,
            matrix: DenseMatrix::identity(dim),
        }
    }
}

/// Values over the fibers of a family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyEval {
    pub fibers: Vec<(f64, EvalResult)>,
}

impl FamilyEval {
    /// Max over entries and interior grid points of the second difference
    /// quotient in `s`; `None` unless the grid is uniform with ≥ 3 points and
    /// all fibers have the same shape.
    pub fn smoothness(&self) -> Option<f64> {
        if self.fibers.len() < 3 {
            return None;
        }
        let h = self.fibers[1].0 - self.fibers[0].0;
        let uniform = self
            .fibers
            .windows(2)
            .all(|w| ((w[1].0 - w[0].0) - h).abs() <= 1e-9 * h.abs().max(1.0));
        let shape = self.fibers[0].1.matrix.shape();
        if !uniform || h <= 0.0 || self.fibers.iter().any(|(_, r)| r.matrix.shape() != shape) {
            return None;
        }
        let mut worst: f64 = 0.0;
        for w in self.fibers.windows(3) {
            let (a, b, c) = (&w[0].1.matrix, &w[1].1.matrix, &w[2].1.matrix);
            for k in 0..a.as_slice().len() {
                let d2 = (a.as_slice()[k] - 2.0 * b.as_slice()[k] + c.as_slice()[k]) / (h * h);
                worst = worst.max(d2.abs());
            }
        }
        Some(worst)
    }
}

/// Evaluation knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub oriented: bool,
    /// Where inside an elbow `[l, r]` the form is applied, as a fraction of
    /// `r − l`; `None` means an absolute parameter value is given in
    /// `elbow_at`.
    pub elbow_fraction: f64,
    pub elbow_at: Option<f64>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            oriented: false,
            elbow_fraction: 0.5,
            elbow_at: None,
        }
    }
}

/// Unoriented evaluation. Fails on [`TftData`] whose compatibility scan
/// did not pass.
pub fn evaluate(z: &TftData, b: &Bordism) -> Result<EvalResult> {
    if !z.is_compatible() {
        return Err(Error::Invariant(format!(
            "unoriented evaluation needs a compatible bilinear form: {}",
            z.compatibility()
        )));
    }
    evaluate_with(z, b, EvalOptions::default())
}

/// Oriented evaluation: positive points carry `ℝ^n`, negative points its
/// dual, and no bilinear form is used.
pub fn evaluate_oriented<P: Primitives + ?Sized>(z: &P, b: &Bordism) -> Result<EvalResult> {
    evaluate_with(
        z,
        b,
        EvalOptions {
            oriented: true,
            ..EvalOptions::default()
        },
    )
}

/// Evaluation through any set of primitives.
pub fn evaluate_with<P: Primitives + ?Sized>(z: &P, b: &Bordism, opts: EvalOptions) -> Result<EvalResult> {
    if b.depends_on_s() {
        return Err(Error::Precondition(
            "bordism depends on s; evaluate it as a family".into(),
        ));
    }
    let mut acc = EvalResult::unit();
    for (k, c) in b.components.iter().enumerate() {
        if opts.oriented && c.orientation == Orientation::Unoriented {
            return Err(Error::Precondition(format!(
                "component {k} is unoriented but oriented evaluation was requested"
            )));
        }
        acc = acc.tensor(&evaluate_component(z, c, opts)?);
    }
    Ok(acc)
}

/// Fiberwise evaluation of a family.
pub fn evaluate_family<P: Primitives + ?Sized>(z: &P, f: &Family, opts: EvalOptions) -> Result<FamilyEval> {
    let fibers = f
        .fibers
        .iter()
        .map(|(s, b)| Ok((*s, evaluate_with(z, b, opts)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FamilyEval { fibers })
}

struct Boundary {
    zeros: Vec<Vec<f64>>,
    signs: Vec<Vec<PointSign>>,
}

impl Boundary {
    fn of(c: &Component, oriented: bool) -> Result<Self> {
        let cuts = c.cut_family();
        let zeros = (0..cuts.len())
            .map(|a| cuts.zeros(a, c.window))
            .collect::<Result<Vec<_>>>()?;
        let signs = if oriented {
            (0..cuts.len())
                .map(|a| c.point_signs(a).map(|v| v.into_iter().map(|(_, s)| s).collect()))
                .collect::<Result<Vec<_>>>()?
        } else {
            zeros.iter().map(|z| vec![PointSign::Positive; z.len()]).collect()
        };
        Ok(Self { zeros, signs })
    }

    fn sign(&self, level: usize, t: f64) -> Option<PointSign> {
        self.zeros[level]
            .iter()
            .position(|&z| z == t)
            .map(|i| self.signs[level][i])
    }

    fn kinds(&self, level: usize, oriented: bool) -> Vec<FactorKind> {
        self.signs[level].iter().map(|s| kind_of(*s, oriented)).collect()
    }
}

fn kind_of(sign: PointSign, oriented: bool) -> FactorKind {
    if oriented && sign == PointSign::Negative {
        FactorKind::Dual
    } else {
        FactorKind::Vector
    }
}

fn evaluate_component<P: Primitives + ?Sized>(z: &P, c: &Component, opts: EvalOptions) -> Result<EvalResult> {
    let n = z.rank();
    let cuts = c.cut_family();
    let boundary = Boundary::of(c, opts.oriented)?;
    let mut acc = EvalResult::identity(boundary.kinds(0, opts.oriented), n);
    for level in 1..cuts.len() {
        let pieces = cuts.core(level - 1, level, c.window)?;
        let mut step = EvalResult::unit();
        for piece in &pieces {
            step = step.tensor(&evaluate_piece(z, c, &boundary, level, piece, opts)?);
        }
        if step.domain.len() != boundary.zeros[level - 1].len() || step.codomain.len() != boundary.zeros[level].len() {
            return Err(Error::Invariant(format!(
                "core X_{}^{} does not cover the boundary points",
                level - 1,
                level
            )));
        }
        acc = acc.then(&step)?;
    }
    Ok(acc)
}

enum Shape {
    Interval { from: f64, to: f64 },
    RightElbow,
    LeftElbow,
}

fn evaluate_piece<P: Primitives + ?Sized>(
    z: &P,
    c: &Component,
    boundary: &Boundary,
    level: usize,
    piece: &Piece,
    opts: EvalOptions,
) -> Result<EvalResult> {
    let n = z.rank();
    let path = &c.path;
    if piece.closed {
        let reversed = opts.oriented && c.orientation == Orientation::Negative;
        return Ok(EvalResult {
            domain: Vec::new(),
            codomain: Vec::new(),
            matrix: DenseMatrix::scalar(z.circle_trace(path, reversed)?),
        });
    }
    let (l, r) = (piece.lo, piece.hi);
    let (l_in, l_out) = (boundary.sign(level - 1, l), boundary.sign(level, l));
    let (r_in, r_out) = (boundary.sign(level - 1, r), boundary.sign(level, r));

    if piece.is_point() {
        let (Some(si), Some(so)) = (l_in, l_out) else {
            return Err(Error::Invariant(format!(
                "isolated core point t = {l} is not a boundary point on both sides"
            )));
        };
        if si != so {
            return Err(Error::Invariant(format!("thin point t = {l} changes orientation")));
        }
        return Ok(EvalResult::identity(vec![kind_of(si, opts.oriented)], n));
    }
    if (l_in.is_some() && l_out.is_some()) || (r_in.is_some() && r_out.is_some()) {
        return Err(Error::Invariant(format!(
            "core piece [{l}, {r}] has an endpoint that is both incoming and outgoing"
        )));
    }
    let shape = match (l_in.is_some(), l_out.is_some(), r_in.is_some(), r_out.is_some()) {
        (true, _, _, true) => Shape::Interval { from: l, to: r },
        (_, true, true, _) => Shape::Interval { from: r, to: l },
        (true, _, true, _) => Shape::RightElbow,
        (_, true, _, true) => Shape::LeftElbow,
        _ => {
            return Err(Error::Invariant(format!(
                "core piece [{l}, {r}] ends at a point that is not a boundary point"
            )))
        }
    };

    let m = match opts.elbow_at {
        Some(m) if m > l && m < r => m,
        Some(m) => {
            return Err(Error::Precondition(format!(
                "elbow evaluation point {m} outside ({l}, {r})"
            )))
        }
        None => l + opts.elbow_fraction * (r - l),
    };

    match shape {
        Shape::Interval { from, to } => {
            let p = z.transport(path, from, to)?;
            let sign = if from == l { l_in } else { r_in }.expect("incoming point");
            let kind = kind_of(sign, opts.oriented);
            let matrix = if kind == FactorKind::Dual {
                p.inverse()?.transpose()
            } else {
                p
            };
            Ok(EvalResult {
                domain: vec![kind],
                codomain: vec![kind],
                matrix,
            })
        }
        Shape::RightElbow => {
            let (sl, sr) = (l_in.expect("in"), r_in.expect("in"));
            if opts.oriented {
                let (kl, kr) = (kind_of(sl, true), kind_of(sr, true));
                let entries = oriented_pairing(z, path, l, r, sl, sr, sl == PointSign::Positive)?;
                Ok(EvalResult {
                    domain: vec![kl, kr],
                    codomain: Vec::new(),
                    matrix: DenseMatrix::from_vec(1, n * n, entries),
                })
            } else {
                let x = path.point(m)?;
                let beta = z.pairing(&x)?;
                let pl = z.transport(path, l, m)?;
                let pr = z.transport(path, r, m)?;
                let form = &(&pl.transpose() * &beta) * &pr;
                Ok(EvalResult {
                    domain: vec![FactorKind::Vector; 2],
                    codomain: Vec::new(),
                    matrix: DenseMatrix::from_vec(1, n * n, form.as_slice().to_vec()),
                })
            }
        }
        Shape::LeftElbow => {
            let (sl, sr) = (l_out.expect("out"), r_out.expect("out"));
            if opts.oriented {
                let (kl, kr) = (kind_of(sl, true), kind_of(sr, true));
                let entries = oriented_pairing(z, path, l, r, sl, sr, sr == PointSign::Positive)?;
                Ok(EvalResult {
                    domain: Vec::new(),
                    codomain: vec![kl, kr],
                    matrix: DenseMatrix::from_vec(n * n, 1, entries),
                })
            } else {
                let x = path.point(m)?;
                let tau = z.copairing(&x)?;
                let pl = z.transport(path, m, l)?;
                let pr = z.transport(path, m, r)?;
                let copair = &(&pl * &tau) * &pr.transpose();
                Ok(EvalResult {
                    domain: Vec::new(),
                    codomain: vec![FactorKind::Vector; 2],
                    matrix: DenseMatrix::from_vec(n * n, 1, copair.as_slice().to_vec()),
                })
            }
        }
    }
}

/// Entries `(i, j)` (first factor at `l`) of the transport between the
/// two ends of an oriented elbow, read as a two-tensor: `P(l→r)_{ji}` when
/// `forward`, else `P(r→l)_{ij}`.
fn oriented_pairing<P: Primitives + ?Sized>(
    z: &P,
    path: &PathData,
    l: f64,
    r: f64,
    sign_l: PointSign,
    sign_r: PointSign,
    forward: bool,
) -> Result<Vec<f64>> {
    let n = z.rank();
    if sign_l == sign_r {
        return Err(Error::Invariant(format!(
            "oriented elbow on [{l}, {r}] has endpoints of equal sign"
        )));
    }
    let p = if forward {
        z.transport(path, l, r)?
    } else {
        z.transport(path, r, l)?
    };
    Ok((0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            if forward {
                p[(j, i)]
            } else {
                p[(i, j)]
            }
        })
        .collect())
}
