use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tftlab::bundle::random::{random_compatible_bundle, random_loop, random_path};
use tftlab::bundle::{
    check_compatibility, coevaluation, cut_rescale, holonomy, holonomy_trace, parallel_transport, pullback_coefficient,
    BundleData, DomainBox, PathData,
};
use tftlab::numerics::{parse_expr, DenseMatrix, SmoothExpr};
use tftlab::Error;

fn rotation_generator() -> DenseMatrix {
    DenseMatrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]])
}

fn rotation_bundle(r: f64) -> BundleData {
    BundleData::constant(
        &[rotation_generator(), DenseMatrix::zeros(2, 2)],
        &DenseMatrix::identity(2),
        DomainBox::cube(2, r),
    )
    .unwrap()
}

fn path(src: &[&str]) -> PathData {
    PathData::new(src.iter().map(|s| parse_expr(s).unwrap()).collect()).unwrap()
}

#[test]
fn pullback_examples() {
    let flat = BundleData::flat(2, DomainBox::cube(2, 1.0)).unwrap();
    let line = path(&["t", "0"]);
    let a = pullback_coefficient(&flat, &line).unwrap();
    assert_eq!(a(0.4).unwrap(), DenseMatrix::zeros(2, 2));

    let b = rotation_bundle(1.0);
    let a = pullback_coefficient(&b, &line).unwrap();
    assert_eq!(a(0.4).unwrap(), rotation_generator());

    let quad = path(&["t^2", "0"]);
    let a = pullback_coefficient(&b, &quad).unwrap();
    for t in [0.1, 0.5, 0.9] {
        assert_eq!(a(t).unwrap(), rotation_generator().scale(2.0 * t));
    }
}

#[test]
fn rotation_transport_over_pi_is_minus_identity() {
    let b = rotation_bundle(4.0);
    let p = parallel_transport(&b, &path(&["t", "0"]), 0.0, PI).unwrap();
    assert!(p.distance(&DenseMatrix::identity(2).scale(-1.0)) <= 1e-9);
    // exp(−Cs) is rotation by −s
    let s = 0.7;
    let p = parallel_transport(&b, &path(&["t", "0"]), 0.0, s).unwrap();
    let expect = DenseMatrix::from_rows(&[vec![s.cos(), s.sin()], vec![-s.sin(), s.cos()]]);
    assert!(p.distance(&expect) <= 1e-10);
}

/// `ω = C (x1 dx2 − x2 dx1) / 2`: holonomy around a centered circle of
/// radius `r` is `exp(−π r² C)`.
fn area_bundle() -> BundleData {
    let c = rotation_generator();
    let lift = |e: &str| -> Vec<Vec<SmoothExpr>> {
        let f = parse_expr(e).unwrap();
        (0..2)
            .map(|i| (0..2).map(|j| f.clone() * c[(i, j)]).collect())
            .collect()
    };
    let id = vec![
        vec![SmoothExpr::one(), SmoothExpr::zero()],
        vec![SmoothExpr::zero(), SmoothExpr::one()],
    ];
    BundleData::new(2, vec![lift("-x2 / 2"), lift("x1 / 2")], id, DomainBox::cube(2, 2.0)).unwrap()
}

fn circle(r: f64) -> PathData {
    let x = format!("{r} * cos(2 * 3.141592653589793 * t)");
    let y = format!("{r} * sin(2 * 3.141592653589793 * t)");
    path(&[&x, &y]).with_period(1.0, &[]).unwrap()
}

#[test]
fn rotation_holonomy_trace() {
    let b = area_bundle();
    assert!((holonomy_trace(&b, &circle(2f64.sqrt())).unwrap() - 2.0 * (2.0 * PI).cos()).abs() <= 1e-9);
    assert!((holonomy_trace(&b, &circle(1.0)).unwrap() + 2.0).abs() <= 1e-9);
    let r = 0.8f64;
    let h = holonomy(&b, &circle(r)).unwrap();
    let angle = PI * r * r;
    let expect = DenseMatrix::from_rows(&[vec![angle.cos(), angle.sin()], vec![-angle.sin(), angle.cos()]]);
    assert!(h.distance(&expect) <= 1e-9);

    // an exact connection has trivial holonomy
    let exact = rotation_bundle(1.0);
    assert!(
        holonomy(&exact, &circle(0.5))
            .unwrap()
            .distance(&DenseMatrix::identity(2))
            <= 1e-9
    );
    assert!(path(&["t", "0"]).with_period(1.0, &[]).is_err());
}

#[test]
fn flat_holonomy_is_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 1..=4 {
        let b = BundleData::flat(n, DomainBox::cube(2, 1.0)).unwrap();
        let lp = random_loop(&mut rng, b.domain());
        assert_eq!(holonomy_trace(&b, &lp).unwrap(), n as f64);
        assert_eq!(holonomy(&b, &lp).unwrap(), DenseMatrix::identity(n));
    }
}

#[test]
fn reversed_loop_keeps_trace_on_compatible_bundles() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..10 {
        let b = random_compatible_bundle(&mut rng, 3, 2).unwrap();
        let lp = random_loop(&mut rng, b.domain());
        let fwd = holonomy_trace(&b, &lp).unwrap();
        let back = holonomy_trace(&b, &lp.reversed()).unwrap();
        assert!((fwd - back).abs() <= 1e-8, "{fwd} {back}");
    }
}

#[test]
fn constant_path_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let b = random_compatible_bundle(&mut rng, 2, 2).unwrap();
    let p = parallel_transport(&b, &PathData::constant(&[0.2, -0.4]), 0.0, 5.0).unwrap();
    assert_eq!(p, DenseMatrix::identity(2));
}

#[test]
fn coevaluation_examples() {
    let d = DomainBox::cube(1, 1.0);
    let b = BundleData::flat(2, d.clone()).unwrap();
    assert_eq!(coevaluation(&b, &[0.0]).unwrap(), DenseMatrix::identity(2));
    let b = BundleData::flat_with_form(&DenseMatrix::diagonal(&[4.0, -9.0]), d).unwrap();
    let tau = coevaluation(&b, &[0.0]).unwrap();
    assert!(tau.distance(&DenseMatrix::diagonal(&[0.25, -1.0 / 9.0])) <= 1e-15);
    // (β ⊗ id)(id ⊗ τ) in coordinates is β τ
    let beta = b.beta_at(&[0.0]).unwrap();
    assert!((&beta * &tau).distance(&DenseMatrix::identity(2)) <= 1e-12);
}

#[test]
fn compatibility_examples() {
    let d = DomainBox::cube(2, 1.0);
    let grid = d.grid(5);
    let flat = BundleData::flat_with_form(&DenseMatrix::diagonal(&[2.0, -1.0]), d.clone()).unwrap();
    assert_eq!(check_compatibility(&flat, &grid, 1e-9).unwrap().max_residual, 0.0);

    // skew ω with polynomial entries, β = I
    let w = parse_expr("x1 * x2 + sin(x1)").unwrap();
    let skew = vec![vec![SmoothExpr::zero(), w.clone()], vec![-w, SmoothExpr::zero()]];
    let id = vec![
        vec![SmoothExpr::one(), SmoothExpr::zero()],
        vec![SmoothExpr::zero(), SmoothExpr::one()],
    ];
    let zero = vec![vec![SmoothExpr::zero(); 2]; 2];
    let b = BundleData::new(2, vec![skew, zero.clone()], id.clone(), d.clone()).unwrap();
    assert!(check_compatibility(&b, &grid, 1e-9).unwrap().max_residual <= 1e-12);

    let bad = vec![
        vec![SmoothExpr::one(), SmoothExpr::zero()],
        vec![SmoothExpr::zero(), SmoothExpr::zero()],
    ];
    let b = BundleData::new(2, vec![bad, zero], id, d).unwrap();
    let report = check_compatibility(&b, &grid, 1e-9).unwrap();
    assert_eq!(report.max_residual, 2.0);
    assert!(!report.passed());
}

#[test]
fn bundle_construction_rejects_bad_forms() {
    let d = DomainBox::cube(1, 1.0);
    let zero = vec![vec![vec![SmoothExpr::zero(); 2]; 2]];
    let asym = vec![
        vec![SmoothExpr::one(), SmoothExpr::constant(0.5)],
        vec![SmoothExpr::zero(), SmoothExpr::one()],
    ];
    assert!(matches!(
        BundleData::new(2, zero.clone(), asym, d.clone()),
        Err(Error::Asymmetric { .. })
    ));
    // degenerate at x1 = 0
    let x = parse_expr("x1").unwrap();
    let degenerate = vec![
        vec![x.clone(), SmoothExpr::zero()],
        vec![SmoothExpr::zero(), SmoothExpr::one()],
    ];
    assert!(matches!(
        BundleData::new(2, zero.clone(), degenerate, d.clone()),
        Err(Error::Degenerate { .. })
    ));
    let uses_t = vec![
        vec![SmoothExpr::t(), SmoothExpr::zero()],
        vec![SmoothExpr::zero(), SmoothExpr::one()],
    ];
    assert!(matches!(
        BundleData::new(2, zero, uses_t, d),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn leaving_the_domain_is_reported() {
    let b = rotation_bundle(1.0);
    let err = parallel_transport(&b, &path(&["2 * t", "0"]), 0.0, 1.0).unwrap_err();
    assert!(matches!(err, Error::OutOfDomain { .. }), "{err}");
}

#[test]
fn gauge_transform_conjugates_transport() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let b = random_compatible_bundle(&mut rng, 2, 2).unwrap();
    let alpha = DenseMatrix::from_rows(&[vec![1.2, 0.3], vec![-0.4, 0.9]]);
    let g = b.gauge_transform(&alpha).unwrap();
    assert!(check_compatibility(&g, &g.domain().grid(5), 1e-9).unwrap().passed());
    let p = random_path(&mut rng, b.domain());
    let pb = parallel_transport(&b, &p, 0.0, 1.0).unwrap();
    let pg = parallel_transport(&g, &p, 0.0, 1.0).unwrap();
    let expect = &(&alpha * &pb) * &alpha.inverse().unwrap();
    assert!(pg.distance(&expect) <= 1e-9);
}

#[test]
fn cut_rescale_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let d = DomainBox::cube(2, 1.0);
    let p = random_path(&mut rng, &d);
    let same = cut_rescale(&p, 0.0, 1.0).unwrap();
    for t in [0.0, 0.3, 1.0] {
        assert_eq!(same.point(t).unwrap(), p.point(t).unwrap());
    }
    let c = 0.4;
    let point = cut_rescale(&p, c, c).unwrap();
    for t in [-1.0, 0.0, 2.0] {
        assert_eq!(point.point(t).unwrap(), p.point(c).unwrap());
    }
    assert!(cut_rescale(&p, 0.6, 0.2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transport_is_multiplicative(seed in any::<u64>(), a in 0.05..0.95f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=3);
        let b = random_compatible_bundle(&mut rng, n, 2).unwrap();
        let p = random_path(&mut rng, b.domain());
        let whole = parallel_transport(&b, &p, 0.0, 1.0).unwrap();
        let first = parallel_transport(&b, &cut_rescale(&p, 0.0, a).unwrap(), 0.0, 1.0).unwrap();
        let second = parallel_transport(&b, &cut_rescale(&p, a, 1.0).unwrap(), 0.0, 1.0).unwrap();
        prop_assert!((&second * &first).distance(&whole) <= 1e-8);
    }

    #[test]
    fn transport_preserves_the_form(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_compatible_bundle(&mut rng, 3, 2).unwrap();
        let p = random_path(&mut rng, b.domain());
        let m = parallel_transport(&b, &p, 0.0, 1.0).unwrap();
        let start = b.beta_at(&p.point(0.0).unwrap()).unwrap();
        let end = b.beta_at(&p.point(1.0).unwrap()).unwrap();
        prop_assert!((&(&m.transpose() * &end) * &m).distance(&start) <= 1e-8);
    }
}
