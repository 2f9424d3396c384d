//! Gauss–Legendre quadrature, fixed and adaptive.

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "quadrature needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed-order Gauss–Legendre rule mapped onto `[a, b]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn integrate(&self, f: &mut impl FnMut(f64) -> Result<f64>, a: f64, b: f64) -> Result<f64> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x)?;
        }
        Ok(acc * half)
    }
}

const ADAPTIVE_ORDER: usize = 10;
const MAX_DEPTH: usize = 40;

/// Adaptive bisection with a 10-point rule until the absolute error
/// estimate is below `tol`.
pub fn integrate_adaptive(mut f: impl FnMut(f64) -> Result<f64>, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let rule = GaussRule::new(ADAPTIVE_ORDER);
    let whole = rule.integrate(&mut f, a, b)?;
    refine(&rule, &mut f, a, b, whole, tol, 0)
}

fn refine(
    rule: &GaussRule,
    f: &mut impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let left = rule.integrate(f, a, m)?;
    let right = rule.integrate(f, m, b)?;
    let split = left + right;
    if (split - whole).abs() <= tol {
        return Ok(split);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Construction(format!(
            "adaptive quadrature did not converge on [{a}, {b}]"
        )));
    }
    Ok(refine(rule, f, a, m, left, 0.5 * tol, depth + 1)? + refine(rule, f, m, b, right, 0.5 * tol, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussRule::new(5);
        let v = rule
            .integrate(&mut |x: f64| Ok(x.powi(9) + 3.0 * x * x), 0.0, 2.0)
            .unwrap();
        assert!((v - (102.4 + 8.0)).abs() < 1e-12);
    }

    #[test]
    fn weights_sum_to_two() {
        for n in 1..20 {
            let (_, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn adaptive_handles_flat_bump() {
        let bump = |x: f64| {
            Ok(if x <= 0.0 || x >= 1.0 {
                0.0
            } else {
                (-1.0 / (x * (1.0 - x))).exp()
            })
        };
        let v = integrate_adaptive(bump, 0.0, 1.0, 1e-14).unwrap();
        // reference value of ∫₀¹ exp(−1/(x(1−x))) dx
        assert!((v - 0.007029858406609).abs() < 1e-12, "{v}");
    }
}
