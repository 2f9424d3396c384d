//! Generalized orthonormal bases for symmetric nondegenerate bilinear forms.

use std::fmt;

use crate::error::{Error, Result};

use super::matrix::DenseMatrix;

/// Symmetry tolerance for bilinear forms.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Sign `ε_i = ±1` of a basis vector's self-pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Basis `b_1..b_n` (as columns) with `b_iᵀ B b_j = ε_i δ_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    pub basis: DenseMatrix,
    pub signs: Vec<Sign>,
}

impl OrthonormalBasis {
    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.basis.column(i)
    }

    /// Positive index of inertia.
    pub fn positive_index(&self) -> usize {
        self.signs.iter().filter(|s| **s == Sign::Plus).count()
    }

    /// `Σ ε_i b_i b_iᵀ`, which equals `B⁻¹`.
    pub fn coevaluation(&self) -> DenseMatrix {
        let n = self.signs.len();
        DenseMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .map(|i| self.signs[i].value() * self.basis[(r, i)] * self.basis[(c, i)])
                .sum()
        })
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues and the matching eigenvectors as columns.
pub fn symmetric_eigen(b: &DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    assert!(b.is_square(), "eigen-decomposition needs a square matrix");
    let n = b.rows();
    let mut a = b.clone();
    let mut v = DenseMatrix::identity(n);
    let scale = b.frobenius_norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

fn pairing(b: &DenseMatrix, u: &[f64], w: &[f64]) -> f64 {
    let n = u.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += u[i] * b[(i, j)] * w[j];
        }
    }
    acc
}

/// Generalized orthonormal basis of a symmetric nondegenerate form.
///
/// Vectors come sorted by decreasing eigenvalue, so all `+` signs precede
/// the `−` signs. Each vector's largest-magnitude entry is positive.
pub fn indefinite_orthonormalize(b: &DenseMatrix) -> Result<OrthonormalBasis> {
    if !b.is_square() {
        return Err(Error::Dimension(format!(
            "bilinear form must be square, got {}x{}",
            b.rows(),
            b.cols()
        )));
    }
    let asymmetry = b.asymmetry();
    if asymmetry > SYMMETRY_TOLERANCE {
        return Err(Error::Asymmetric { asymmetry });
    }
    let det = b.determinant();
    if !(det.abs() > super::matrix::INVERTIBILITY_THRESHOLD) {
        return Err(Error::Degenerate { det });
    }
    let n = b.rows();
    let (values, vectors) = symmetric_eigen(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut signs = Vec::with_capacity(n);
    for &i in &order {
        let mut v = vectors.column(i);
        // one indefinite Gram–Schmidt pass against the vectors already fixed
        for (bj, sj) in basis.iter().zip(&signs) {
            let proj = pairing(b, &v, bj) * Sign::value(*sj);
            for (vk, bk) in v.iter_mut().zip(bj) {
                *vk -= proj * bk;
            }
        }
        let self_pairing = pairing(b, &v, &v);
        if self_pairing == 0.0 {
            return Err(Error::Degenerate { det });
        }
        let norm = self_pairing.abs().sqrt();
        let pivot = v
            .iter()
            .cloned()
            .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        let flip = if pivot < 0.0 { -1.0 } else { 1.0 };
        for x in v.iter_mut() {
            *x *= flip / norm;
        }
        basis.push(v);
        signs.push(Sign::of(self_pairing));
    }
    let basis = DenseMatrix::from_fn(n, n, |r, c| basis[c][r]);
    Ok(OrthonormalBasis { basis, signs })
}

/// Largest deviation of `b_iᵀ B b_j` from `ε_i δ_ij`.
pub fn gram_residual(b: &DenseMatrix, onb: &OrthonormalBasis) -> f64 {
    let n = onb.signs.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { onb.signs[i].value() } else { 0.0 };
            let got = pairing(b, &onb.vector(i), &onb.vector(j));
            worst = worst.max((got - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_gives_standard_basis() {
        let onb = indefinite_orthonormalize(&DenseMatrix::identity(2)).unwrap();
        assert_eq!(onb.basis, DenseMatrix::identity(2));
        assert_eq!(onb.signs, vec![Sign::Plus, Sign::Plus]);
    }

    #[test]
    fn diagonal_indefinite_form() {
        let b = DenseMatrix::diagonal(&[4.0, -9.0]);
        let onb = indefinite_orthonormalize(&b).unwrap();
        assert_eq!(onb.vector(0), vec![0.5, 0.0]);
        assert_eq!(onb.vector(1), vec![0.0, 1.0 / 3.0]);
        assert_eq!(onb.signs, vec![Sign::Plus, Sign::Minus]);
        assert!(gram_residual(&b, &onb) <= 1e-15);
    }

    #[test]
    fn hyperbolic_plane() {
        let b = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let onb = indefinite_orthonormalize(&b).unwrap();
        assert_eq!(onb.signs, vec![Sign::Plus, Sign::Minus]);
        assert!(gram_residual(&b, &onb) <= 1e-12);
    }

    #[test]
    fn rejects_asymmetric_and_degenerate_input() {
        let asym = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        assert!(matches!(
            indefinite_orthonormalize(&asym),
            Err(Error::Asymmetric { .. })
        ));
        let degenerate = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(matches!(
            indefinite_orthonormalize(&degenerate),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn coevaluation_is_inverse() {
        let b = DenseMatrix::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, -3.0, 0.5], vec![0.0, 0.5, 1.0]]);
        let onb = indefinite_orthonormalize(&b).unwrap();
        let tau = onb.coevaluation();
        assert!((&b * &tau).distance(&DenseMatrix::identity(3)) <= 1e-13);
    }
}
