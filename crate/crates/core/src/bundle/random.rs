//! Seeded generators of bundles, paths and reparametrizations for the
//! property suites.

use rand::Rng;

use crate::error::Result;
use crate::numerics::{DenseMatrix, SmoothExpr};

use super::data::{BundleData, DomainBox};
use super::path::PathData;

/// Symmetric nondegenerate form `Sᵀ D S` with `|D_ii| ∈ [0.5, 2]` and
/// `negatives` negative entries in `D`.
pub fn random_symmetric_form<R: Rng + ?Sized>(rng: &mut R, n: usize, negatives: usize) -> DenseMatrix {
    let d: Vec<f64> = (0..n)
        .map(|i| {
            let mag = rng.gen_range(0.5..2.0);
            if i < negatives {
                -mag
            } else {
                mag
            }
        })
        .collect();
    let s = DenseMatrix::from_fn(n, n, |i, j| (if i == j { 1.0 } else { 0.0 }) + rng.gen_range(-0.3..0.3));
    let b = &(&s.transpose() * &DenseMatrix::diagonal(&d)) * &s;
    // exact symmetry
    DenseMatrix::from_fn(n, n, |i, j| 0.5 * (b[(i, j)] + b[(j, i)]))
}

/// Polynomial of total degree ≤ 2 in `x1..xm` with coefficients in `[−c, c]`.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, dim: usize, c: f64) -> SmoothExpr {
    let mut p = SmoothExpr::constant(rng.gen_range(-c..c));
    for mu in 1..=dim {
        p = p + SmoothExpr::x(mu) * rng.gen_range(-c..c);
    }
    for mu in 1..=dim {
        for nu in mu..=dim {
            p = p + SmoothExpr::x(mu) * SmoothExpr::x(nu) * rng.gen_range(-0.5 * c..0.5 * c);
        }
    }
    p
}

/// Constant `β` with random signature and `ω_μ = β⁻¹K_μ(x)`, `K_μ` skew
/// with polynomial entries, so that `ω_μᵀβ + βω_μ = 0 = ∂_μβ` exactly.
pub fn random_compatible_bundle<R: Rng + ?Sized>(rng: &mut R, rank: usize, dim: usize) -> Result<BundleData> {
    let negatives = rng.gen_range(0..=rank);
    let beta = random_symmetric_form(rng, rank, negatives);
    compatible_bundle_for_form(rng, &beta, dim)
}

pub fn compatible_bundle_for_form<R: Rng + ?Sized>(rng: &mut R, beta: &DenseMatrix, dim: usize) -> Result<BundleData> {
    let n = beta.rows();
    let inv = beta.inverse()?;
    let mut omega = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut k = vec![vec![SmoothExpr::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let p = random_polynomial(rng, dim, 1.0);
                k[j][i] = -p.clone();
                k[i][j] = p;
            }
        }
        let w: Vec<Vec<SmoothExpr>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut acc = SmoothExpr::zero();
                        for (l, row) in k.iter().enumerate() {
                            if !row[j].is_zero() {
                                acc = acc + row[j].clone() * inv[(i, l)];
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        omega.push(w);
    }
    let b = (0..n)
        .map(|i| (0..n).map(|j| SmoothExpr::constant(beta[(i, j)])).collect())
        .collect();
    BundleData::new(n, omega, b, DomainBox::cube(dim, 1.0))
}

/// Arbitrary polynomial connection with `β = I`; generally incompatible.
pub fn random_bundle<R: Rng + ?Sized>(rng: &mut R, rank: usize, dim: usize) -> Result<BundleData> {
    let omega = (0..dim)
        .map(|_| {
            (0..rank)
                .map(|_| (0..rank).map(|_| random_polynomial(rng, dim, 1.0)).collect())
                .collect()
        })
        .collect();
    let beta = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| SmoothExpr::constant(if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();
    BundleData::new(rank, omega, beta, DomainBox::cube(dim, 1.0))
}

/// Trigonometric path that stays inside `domain` for every real `t`.
pub fn random_path<R: Rng + ?Sized>(rng: &mut R, domain: &DomainBox) -> PathData {
    let comps = (0..domain.dim())
        .map(|mu| {
            let half = 0.5 * (domain.hi[mu] - domain.lo[mu]);
            let mid = 0.5 * (domain.hi[mu] + domain.lo[mu]);
            let c = mid + rng.gen_range(-0.2..0.2) * half;
            let a = rng.gen_range(0.1..0.35) * half;
            let b = rng.gen_range(0.0..0.3) * half;
            let w1 = rng.gen_range(1.0..4.0);
            let w2 = rng.gen_range(1.0..4.0);
            let p = rng.gen_range(0.0..std::f64::consts::TAU);
            let t = SmoothExpr::t();
            SmoothExpr::constant(c) + SmoothExpr::sin(&(t.clone() * w1 + p)) * a + SmoothExpr::cos(&(t * w2)) * b
        })
        .collect();
    PathData::new(comps).expect("random path has valid dimension")
}

/// Closed loop of period 1 inside `domain`.
pub fn random_loop<R: Rng + ?Sized>(rng: &mut R, domain: &DomainBox) -> PathData {
    let tau = std::f64::consts::TAU;
    let comps = (0..domain.dim())
        .map(|mu| {
            let half = 0.5 * (domain.hi[mu] - domain.lo[mu]);
            let mid = 0.5 * (domain.hi[mu] + domain.lo[mu]);
            let c = mid + rng.gen_range(-0.2..0.2) * half;
            let a = rng.gen_range(0.2..0.4) * half;
            let b = rng.gen_range(0.0..0.3) * half;
            let p = rng.gen_range(0.0..tau);
            let k = rng.gen_range(1..=2) as f64;
            let t = SmoothExpr::t();
            SmoothExpr::constant(c)
                + SmoothExpr::cos(&(t.clone() * tau + p)) * a
                + SmoothExpr::sin(&(t * (k * tau))) * b
        })
        .collect();
    PathData::new(comps)
        .expect("random loop has valid dimension")
        .with_period(1.0, &[])
        .expect("trigonometric loop is periodic")
}

/// Strictly increasing `F(t) = c₀ + c₁t + c₃t³ + c_s sin(ωt)` with
/// `F′ ≥ c₁ − c_s ω > 0`.
pub fn random_increasing_reparametrization<R: Rng + ?Sized>(rng: &mut R) -> SmoothExpr {
    let c0 = rng.gen_range(-0.3..0.3);
    let c1 = rng.gen_range(0.5..2.0);
    let c3 = rng.gen_range(0.0..0.5);
    let w = rng.gen_range(1.0..5.0);
    let cs = rng.gen_range(0.0..0.9) * c1 / w;
    let t = SmoothExpr::t();
    SmoothExpr::constant(c0) + t.clone() * c1 + SmoothExpr::powi(&t, 3) * c3 + SmoothExpr::sin(&(t * w)) * cs
}
