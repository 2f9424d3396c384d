use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{Assignment, DenseMatrix, SmoothExpr, Var, INVERTIBILITY_THRESHOLD};

/// Samples per axis used when validating fields over the domain box.
pub const VALIDATION_SAMPLES: usize = 5;

/// Symmetry tolerance for `β(x)` at sampled points.
pub const BETA_SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Axis-aligned box `M ⊆ ℝ^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl DomainBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Dimension(format!(
                "domain bounds have lengths {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l < h)) {
            return Err(Error::Precondition("domain box needs lo < hi on every axis".into()));
        }
        Ok(Self { lo, hi })
    }

    /// `[-r, r]^m`.
    pub fn cube(dim: usize, r: f64) -> Self {
        Self {
            lo: vec![-r; dim],
            hi: vec![r; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| {
                let slack = 1e-9 * (h - l).max(1.0);
                *v >= l - slack && *v <= h + slack
            })
    }

    /// Uniform tensor grid with `per_axis` points per axis, endpoints included.
    pub fn grid(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let per_axis = per_axis.max(1);
        let m = self.dim();
        let coord = |a: usize, k: usize| {
            if per_axis == 1 {
                0.5 * (self.lo[a] + self.hi[a])
            } else {
                self.lo[a] + (self.hi[a] - self.lo[a]) * k as f64 / (per_axis - 1) as f64
            }
        };
        (0..per_axis.pow(m as u32))
            .map(|mut idx| {
                let mut p = vec![0.0; m];
                for a in (0..m).rev() {
                    p[a] = coord(a, idx % per_axis);
                    idx /= per_axis;
                }
                p
            })
            .collect()
    }
}

/// A rank-`n` trivial bundle over a box in `ℝ^m`, with connection
/// coefficients `ω^i_{j,μ}` and a bilinear form field `β_{ij}`.
#[derive(Clone, PartialEq)]
pub struct BundleData {
    rank: usize,
    dim: usize,
    /// `omega[μ][i * n + j]`.
    omega: Vec<Vec<SmoothExpr>>,
    beta: Vec<SmoothExpr>,
    /// `beta_d[μ][i * n + j] = ∂_μ β_ij`.
    beta_d: Vec<Vec<SmoothExpr>>,
    domain: DomainBox,
}

impl fmt::Debug for BundleData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BundleData")
            .field("rank", &self.rank)
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl BundleData {
    /// Builds a bundle from `omega[μ][i][j]` and `beta[i][j]`.
    ///
    /// Fields may only use `x1..xm`. `β` is checked for symmetry and
    /// invertibility on a validation grid over the domain.
    pub fn new(
        rank: usize,
        omega: Vec<Vec<Vec<SmoothExpr>>>,
        beta: Vec<Vec<SmoothExpr>>,
        domain: DomainBox,
    ) -> Result<Self> {
        let dim = domain.dim();
        if rank == 0 {
            return Err(Error::Precondition("rank must be positive".into()));
        }
        if dim > 9 {
            return Err(Error::Dimension(format!("target dimension {dim} exceeds 9")));
        }
        if omega.len() != dim {
            return Err(Error::Dimension(format!(
                "expected {dim} connection matrices, got {}",
                omega.len()
            )));
        }
        let square = |m: &Vec<Vec<SmoothExpr>>| m.len() == rank && m.iter().all(|r| r.len() == rank);
        if !omega.iter().all(square) || !square(&beta) {
            return Err(Error::Dimension(format!("fields must be {rank}x{rank}")));
        }
        let flatten = |m: Vec<Vec<SmoothExpr>>| m.into_iter().flatten().collect::<Vec<_>>();
        let omega: Vec<Vec<SmoothExpr>> = omega.into_iter().map(flatten).collect();
        let beta = flatten(beta);
        for e in omega.iter().flatten().chain(&beta) {
            if let Some(v) = e
                .variables()
                .into_iter()
                .find(|v| !matches!(v, Var::X(i) if (*i as usize) <= dim))
            {
                return Err(Error::Precondition(format!(
                    "bundle field `{e}` uses `{v}`, only x1..x{dim} are allowed"
                )));
            }
        }
        let beta_d = (1..=dim)
            .map(|mu| beta.iter().map(|e| e.differentiate(Var::x(mu))).collect())
            .collect();
        let bundle = Self {
            rank,
            dim,
            omega,
            beta,
            beta_d,
            domain,
        };
        for x in bundle.domain.grid(VALIDATION_SAMPLES) {
            let b = bundle.beta_at(&x)?;
            let asymmetry = b.asymmetry();
            if asymmetry > BETA_SYMMETRY_TOLERANCE {
                return Err(Error::Asymmetric { asymmetry });
            }
            let det = b.determinant();
            if !(det.abs() > INVERTIBILITY_THRESHOLD) {
                return Err(Error::Degenerate { det });
            }
        }
        Ok(bundle)
    }

    /// Flat bundle `ω ≡ 0` with constant form `β`.
    pub fn flat_with_form(beta: &DenseMatrix, domain: DomainBox) -> Result<Self> {
        let n = beta.rows();
        let zero = vec![vec![vec![SmoothExpr::zero(); n]; n]; domain.dim()];
        let b = (0..n)
            .map(|i| (0..n).map(|j| SmoothExpr::constant(beta[(i, j)])).collect())
            .collect();
        Self::new(n, zero, b, domain)
    }

    /// Flat bundle with `β = I`.
    pub fn flat(rank: usize, domain: DomainBox) -> Result<Self> {
        Self::flat_with_form(&DenseMatrix::identity(rank), domain)
    }

    /// Same bundle with constant matrices `ω_μ = C_μ` and form `β`.
    pub fn constant(omega: &[DenseMatrix], beta: &DenseMatrix, domain: DomainBox) -> Result<Self> {
        let n = beta.rows();
        let lift = |m: &DenseMatrix| {
            (0..n)
                .map(|i| (0..n).map(|j| SmoothExpr::constant(m[(i, j)])).collect())
                .collect::<Vec<Vec<SmoothExpr>>>()
        };
        Self::new(n, omega.iter().map(lift).collect(), lift(beta), domain)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    /// `ω^i_{j,μ}` with 0-based `μ`.
    pub fn omega_expr(&self, mu: usize, i: usize, j: usize) -> &SmoothExpr {
        &self.omega[mu][i * self.rank + j]
    }

    pub fn beta_expr(&self, i: usize, j: usize) -> &SmoothExpr {
        &self.beta[i * self.rank + j]
    }

    fn eval_matrix(&self, fields: &[SmoothExpr], x: &[f64]) -> Result<DenseMatrix> {
        if x.len() != self.dim {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, target has {}",
                x.len(),
                self.dim
            )));
        }
        let at = Assignment::new().with_point(x);
        let data = fields.iter().map(|e| e.eval(&at)).collect::<Result<Vec<_>>>()?;
        Ok(DenseMatrix::from_vec(self.rank, self.rank, data))
    }

    /// `ω_μ(x)` with 0-based `μ`.
    pub fn omega_at(&self, mu: usize, x: &[f64]) -> Result<DenseMatrix> {
        self.eval_matrix(&self.omega[mu], x)
    }

    /// `ω(x)(v) = Σ_μ ω_μ(x) v^μ`.
    pub fn connection_at(&self, x: &[f64], v: &[f64]) -> Result<DenseMatrix> {
        let mut acc = DenseMatrix::zeros(self.rank, self.rank);
        for (mu, &vm) in v.iter().enumerate().take(self.dim) {
            if vm != 0.0 {
                acc = &acc + &self.omega_at(mu, x)?.scale(vm);
            }
        }
        Ok(acc)
    }

    pub fn beta_at(&self, x: &[f64]) -> Result<DenseMatrix> {
        self.eval_matrix(&self.beta, x)
    }

    /// `∂_μ β(x)` with 0-based `μ`.
    pub fn beta_derivative_at(&self, mu: usize, x: &[f64]) -> Result<DenseMatrix> {
        self.eval_matrix(&self.beta_d[mu], x)
    }

    /// Gauge transform by a constant invertible `α`:
    /// `ω' = α ω α⁻¹`, `β' = α⁻ᵀ β α⁻¹`.
    pub fn gauge_transform(&self, alpha: &DenseMatrix) -> Result<Self> {
        let n = self.rank;
        if alpha.shape() != (n, n) {
            return Err(Error::Dimension("gauge matrix must match the rank".into()));
        }
        let inv = alpha.inverse()?;
        let conj = |fields: &[SmoothExpr], left: &DenseMatrix, right: &DenseMatrix| {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let mut acc = SmoothExpr::zero();
                            for k in 0..n {
                                for l in 0..n {
                                    let c = left[(i, k)] * right[(l, j)];
                                    if c != 0.0 && !fields[k * n + l].is_zero() {
                                        acc = &acc + &(&fields[k * n + l] * &SmoothExpr::constant(c));
                                    }
                                }
                            }
                            acc
                        })
                        .collect()
                })
                .collect::<Vec<Vec<SmoothExpr>>>()
        };
        let omega = self.omega.iter().map(|w| conj(w, alpha, &inv)).collect();
        let beta = conj(&self.beta, &inv.transpose(), &inv);
        Self::new(n, omega, beta, self.domain.clone())
    }
}
