//! Tensor-product Chebyshev interpolation on a box.
//!
//! Turns sampled fields back into closed-form [`SmoothExpr`] polynomials, so
//! data recovered from samples can be fed to everything that expects
//! expressions (symbolic derivatives included).

use crate::error::{Error, Result};

use super::expr::{SmoothExpr, Var};

/// Chebyshev nodes of the first kind on a box `[lo, hi] ⊂ ℝ^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevGrid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    degree: usize,
}

impl ChebyshevGrid {
    pub fn new(lo: &[f64], hi: &[f64], degree: usize) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || lo.len() > 9 {
            return Err(Error::Dimension(format!(
                "box bounds of lengths {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        if lo.iter().zip(hi).any(|(l, h)| !(l < h)) {
            return Err(Error::Precondition("box must have lo < hi on every axis".into()));
        }
        Ok(Self {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            degree,
        })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The `degree + 1` nodes along one axis, increasing.
    pub fn axis_nodes(&self, axis: usize) -> Vec<f64> {
        let k = self.degree + 1;
        let (lo, hi) = (self.lo[axis], self.hi[axis]);
        (0..k)
            .rev()
            .map(|j| {
                let x = (std::f64::consts::PI * (2 * j + 1) as f64 / (2 * k) as f64).cos();
                0.5 * (lo + hi) + 0.5 * (hi - lo) * x
            })
            .collect()
    }

    /// All grid points, last axis varying fastest.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = (0..self.dim()).map(|a| self.axis_nodes(a)).collect();
        let k = self.degree + 1;
        let total = k.pow(self.dim() as u32);
        (0..total)
            .map(|mut idx| {
                let mut p = vec![0.0; self.dim()];
                for a in (0..self.dim()).rev() {
                    p[a] = axes[a][idx % k];
                    idx /= k;
                }
                p
            })
            .collect()
    }

    /// Interpolating polynomial through `values` given in [`Self::points`] order.
    pub fn interpolate(&self, values: &[f64]) -> Result<SmoothExpr> {
        let k = self.degree + 1;
        if values.len() != k.pow(self.dim() as u32) {
            return Err(Error::Dimension(format!(
                "{} samples for a grid of {} points",
                values.len(),
                k.pow(self.dim() as u32)
            )));
        }
        let bases: Vec<Vec<SmoothExpr>> = (0..self.dim())
            .map(|a| lagrange_basis(&self.axis_nodes(a), Var::x(a + 1)))
            .collect();
        Ok(nested(&bases, values, 0, k))
    }
}

fn lagrange_basis(nodes: &[f64], var: Var) -> Vec<SmoothExpr> {
    let x = SmoothExpr::var(var);
    (0..nodes.len())
        .map(|i| {
            let mut term = SmoothExpr::one();
            for (j, &xj) in nodes.iter().enumerate() {
                if j != i {
                    let factor = (&x - &SmoothExpr::constant(xj)) / (nodes[i] - xj);
                    term = &term * &factor;
                }
            }
            term
        })
        .collect()
}

fn nested(bases: &[Vec<SmoothExpr>], values: &[f64], axis: usize, k: usize) -> SmoothExpr {
    if axis == bases.len() {
        return SmoothExpr::constant(values[0]);
    }
    let stride = values.len() / k;
    let mut acc = SmoothExpr::zero();
    for i in 0..k {
        let inner = nested(bases, &values[i * stride..(i + 1) * stride], axis + 1, k);
        if !inner.is_zero() {
            acc = &acc + &(&bases[axis][i] * &inner);
        }
    }
    acc
}
