//! Real roots of scalar functions on an interval.

use crate::error::Result;

/// Sample density of the sign scan, per unit length.
pub const SCAN_DENSITY: f64 = 200.0;

/// Bisection stops once the bracket is shorter than this.
pub const ROOT_TOLERANCE: f64 = 1e-12;

/// All sign changes and exact zeros of `f` on `[lo, hi]`, found by a grid
/// scan and refined by bisection. Roots closer together than one grid cell
/// are not separated.
pub fn find_roots(f: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<Vec<f64>> {
    find_roots_with_density(f, lo, hi, SCAN_DENSITY)
}

pub fn find_roots_with_density(f: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64, density: f64) -> Result<Vec<f64>> {
    if lo > hi {
        return Ok(Vec::new());
    }
    if lo == hi {
        return Ok(if f(lo)? == 0.0 { vec![lo] } else { Vec::new() });
    }
    let cells = ((hi - lo) * density).ceil().max(1.0) as usize;
    let node = |k: usize| {
        if k == cells {
            hi
        } else {
            lo + (hi - lo) * k as f64 / cells as f64
        }
    };
    let mut roots = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(lo)?;
    if f0 == 0.0 {
        roots.push(lo);
    }
    for k in 1..=cells {
        let x1 = node(k);
        let f1 = f(x1)?;
        if f1 == 0.0 {
            roots.push(x1);
        } else if f0 != 0.0 && f0.signum() != f1.signum() {
            roots.push(bisect(&f, x0, x1, f0)?);
        }
        x0 = x1;
        f0 = f1;
    }
    Ok(roots)
}

fn bisect(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64> {
    while b - a > ROOT_TOLERANCE {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_roots_of_quadratic() {
        let roots = find_roots(|t| Ok((t - 0.25) * (t - 1.7)), -1.0, 3.0).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - 0.25).abs() <= 1e-12);
        assert!((roots[1] - 1.7).abs() <= 1e-12);
    }

    #[test]
    fn exact_grid_zero_is_reported_once() {
        let roots = find_roots(Ok, -1.0, 1.0).unwrap();
        assert_eq!(roots, vec![0.0]);
    }

    #[test]
    fn degenerate_interval() {
        assert_eq!(find_roots(Ok, 0.0, 0.0).unwrap(), vec![0.0]);
        assert!(find_roots(|t| Ok(t - 5.0), 0.0, 0.0).unwrap().is_empty());
    }
}
