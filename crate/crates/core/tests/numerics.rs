use approx::assert_relative_eq;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tftlab::bundle::random::random_symmetric_form;
use tftlab::numerics::{
    fundamental_solution, gram_residual, indefinite_orthonormalize, parse_expr, Assignment, ChebyshevGrid, DenseMatrix,
    OdeProblem, Sign, SmoothExpr, Var,
};

/// `exp(M)` by scaling and squaring with a degree-18 Taylor core.
fn expm(m: &DenseMatrix) -> DenseMatrix {
    let n = m.rows();
    let norm = m.max_abs() * n as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let a = m.scale(0.5f64.powi(squarings));
    let mut term = DenseMatrix::identity(n);
    let mut sum = DenseMatrix::identity(n);
    for k in 1..=18 {
        term = (&term * &a).scale(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn at_t(t: f64) -> Assignment {
    Assignment::new().with_t(t)
}

#[test]
fn eval_examples() {
    let t = SmoothExpr::t();
    assert_eq!(SmoothExpr::powi(&t, 2).eval(&at_t(3.0)).unwrap(), 9.0);
    assert_eq!(SmoothExpr::sin(&t).eval(&at_t(0.0)).unwrap(), 0.0);
    let e = SmoothExpr::exp(&t) * t.clone();
    assert_relative_eq!(e.eval(&at_t(1.0)).unwrap(), std::f64::consts::E, max_relative = 1e-15);
}

#[test]
fn derivative_examples() {
    let t = SmoothExpr::t();
    let d = SmoothExpr::powi(&t, 2).differentiate(Var::T);
    for x in [-1.5, 0.0, 2.0] {
        assert_eq!(d.eval(&at_t(x)).unwrap(), 2.0 * x);
    }
    let d = SmoothExpr::sin(&t).differentiate(Var::T);
    assert_eq!(d.eval(&at_t(0.7)).unwrap(), 0.7f64.cos());

    let f = t.clone() * SmoothExpr::exp(&t);
    let d = f.differentiate(Var::T).eval(&at_t(1.0)).unwrap();
    let h = 1e-5;
    let fd = (f.eval(&at_t(1.0 + h)).unwrap() - f.eval(&at_t(1.0 - h)).unwrap()) / (2.0 * h);
    assert_relative_eq!(d, 2.0 * std::f64::consts::E, max_relative = 1e-15);
    assert!((d - fd).abs() <= 1e-8);
}

#[test]
fn division_by_zero_names_the_subtree() {
    let e = parse_expr("1 / (t - 1)").unwrap();
    let err = e.eval(&at_t(1.0)).unwrap_err();
    assert!(err.to_string().contains("t - 1"), "{err}");
}

fn arb_expr() -> impl Strategy<Value = SmoothExpr> {
    let leaf = prop_oneof![
        (-2.0..2.0f64).prop_map(SmoothExpr::constant),
        Just(SmoothExpr::t()),
        Just(SmoothExpr::x(1)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            inner.clone().prop_map(|a| SmoothExpr::sin(&a)),
            inner.clone().prop_map(|a| SmoothExpr::cos(&a)),
            inner.clone().prop_map(|a| SmoothExpr::exp(&(SmoothExpr::sin(&a)))),
            (inner, 0..4i32).prop_map(|(a, k)| SmoothExpr::powi(&a, k)),
        ]
    })
}

proptest! {
    #[test]
    fn symbolic_derivative_matches_central_difference(e in arb_expr(), t in -1.0..1.0f64, x in -1.0..1.0f64) {
        let at = |t: f64| Assignment::new().with_t(t).with_point(&[x]);
        let d = e.differentiate(Var::T);
        let exact = d.eval(&at(t)).unwrap();
        let vars = d.variables();
        prop_assert!(vars.iter().all(|v| e.variables().contains(v)));
        // Richardson pair: the error of the h-quotient is O(h²)
        let fd = |h: f64| (e.eval(&at(t + h)).unwrap() - e.eval(&at(t - h)).unwrap()) / (2.0 * h);
        let (e1, e2) = (fd(1e-3), fd(5e-4));
        let extrapolated = (4.0 * e2 - e1) / 3.0;
        let scale = 1.0 + exact.abs();
        prop_assert!((e2 - exact).abs() <= 1e-4 * scale, "{} vs {}", e2, exact);
        prop_assert!((extrapolated - exact).abs() <= 1e-7 * scale, "{} vs {}", extrapolated, exact);
    }

    #[test]
    fn display_reparses(e in arb_expr(), t in -1.0..1.0f64) {
        let back = parse_expr(&e.to_string()).unwrap();
        let at = Assignment::new().with_t(t).with_point(&[0.3]);
        prop_assert_eq!(back.eval(&at).unwrap(), e.eval(&at).unwrap());
    }

    #[test]
    fn gram_identity_on_random_forms(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let negatives = rng.gen_range(0..=n);
        let b = random_symmetric_form(&mut rng, n, negatives);
        let onb = indefinite_orthonormalize(&b).unwrap();
        prop_assert!(gram_residual(&b, &onb) <= 1e-12);
        prop_assert_eq!(onb.positive_index(), n - negatives);
        let tau = onb.coevaluation();
        prop_assert!((&b * &tau).distance(&DenseMatrix::identity(n)) <= 1e-11);
    }
}

#[test]
fn gram_identity_on_100_matrices_with_eigen_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let b = DenseMatrix::from_fn(n, n, |_, _| rng.gen_range(-2.0..2.0));
        let b = DenseMatrix::from_fn(n, n, |i, j| 0.5 * (b[(i, j)] + b[(j, i)]));
        let nb = DMatrix::from_row_slice(n, n, b.as_slice());
        let eig = nb.symmetric_eigen();
        if eig.eigenvalues.iter().any(|l| l.abs() < 1e-3) {
            continue;
        }
        let onb = indefinite_orthonormalize(&b).unwrap();
        let positives = eig.eigenvalues.iter().filter(|l| **l > 0.0).count();
        assert_eq!(onb.positive_index(), positives);
        assert!(onb
            .signs
            .windows(2)
            .all(|w| !(w[0] == Sign::Minus && w[1] == Sign::Plus)));
        let cond = eig.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max)
            / eig.eigenvalues.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min);
        assert!(
            gram_residual(&b, &onb) <= 1e-12 * cond.max(1.0),
            "{}",
            gram_residual(&b, &onb)
        );
    }
}

#[test]
fn orthonormal_examples() {
    let b = DenseMatrix::diagonal(&[4.0, -9.0]);
    let onb = indefinite_orthonormalize(&b).unwrap();
    assert_eq!(onb.vector(0), vec![0.5, 0.0]);
    assert_eq!(onb.vector(1), vec![0.0, 1.0 / 3.0]);
    assert_eq!(onb.signs, vec![Sign::Plus, Sign::Minus]);

    let h = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
    let onb = indefinite_orthonormalize(&h).unwrap();
    assert_eq!(onb.signs, vec![Sign::Plus, Sign::Minus]);
    assert!(gram_residual(&h, &onb) <= 1e-12);
}

#[test]
fn zero_coefficient_gives_identity() {
    let p = OdeProblem::new(|_| Ok(DenseMatrix::zeros(3, 3)), 0.0, 1.0);
    assert_eq!(fundamental_solution(&p).unwrap(), DenseMatrix::identity(3));
}

#[test]
fn constant_coefficient_matches_matrix_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let n = rng.gen_range(1..=4);
        let c = DenseMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.5..1.5));
        let len = rng.gen_range(0.1..3.0);
        let cc = c.clone();
        let phi = fundamental_solution(&OdeProblem::new(move |_| Ok(cc.clone()), 0.0, len)).unwrap();
        let expect = expm(&c.scale(len));
        let err = phi.distance(&expect) / expect.frobenius_norm();
        assert!(err <= 1e-9, "{err}");
    }
}

#[test]
fn reversed_interval_is_inverse() {
    let a = |t: f64| {
        Ok(DenseMatrix::from_rows(&[
            vec![t.sin(), 1.0 + t],
            vec![-0.5, t * t - 0.3],
        ]))
    };
    let rtol = 1e-10;
    let fwd = fundamental_solution(&OdeProblem::new(a, 0.2, 1.7).with_rtol(rtol)).unwrap();
    let back = fundamental_solution(&OdeProblem::new(a, 1.7, 0.2).with_rtol(rtol)).unwrap();
    let err = (&fwd * &back).distance(&DenseMatrix::identity(2));
    assert!(err <= 10.0 * rtol * fwd.frobenius_norm().max(1.0), "{err}");
}

#[test]
fn chebyshev_reproduces_polynomials_up_to_degree() {
    let grid = ChebyshevGrid::new(&[-1.0, 0.0], &[1.0, 2.0], 4).unwrap();
    let f = |x: &[f64]| 1.0 - 2.0 * x[0] + x[0] * x[1] * x[1] + 0.5 * x[0].powi(4) * x[1].powi(3);
    let values: Vec<f64> = grid.points().iter().map(|p| f(p)).collect();
    let p = grid.interpolate(&values).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let x: [f64; 2] = [rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0)];
        let got = p.eval(&Assignment::new().with_point(&x)).unwrap();
        assert!((got - f(&x)).abs() <= 1e-11, "{got} vs {}", f(&x));
    }
    let dx = p.differentiate(Var::x(1));
    let x = [0.3f64, 1.1];
    let expect = -2.0 + x[1] * x[1] + 2.0 * x[0].powi(3) * x[1].powi(3);
    assert!((dx.eval(&Assignment::new().with_point(&x)).unwrap() - expect).abs() <= 1e-10);
}

#[test]
fn kron_and_inverse_against_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let a = DenseMatrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
    let b = DenseMatrix::from_fn(2, 2, |_, _| rng.gen_range(-1.0..1.0));
    let na = DMatrix::from_row_slice(3, 3, a.as_slice());
    let nb = DMatrix::from_row_slice(2, 2, b.as_slice());
    let nk = na.kronecker(&nb);
    let k = a.kron(&b);
    for i in 0..6 {
        for j in 0..6 {
            assert_eq!(k[(i, j)], nk[(i, j)]);
        }
    }
    let inv = a.inverse().unwrap();
    let ninv = na.clone().try_inverse().unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert_relative_eq!(inv[(i, j)], ninv[(i, j)], max_relative = 1e-10);
        }
    }
    assert_relative_eq!(a.determinant(), na.determinant(), max_relative = 1e-12);
}
