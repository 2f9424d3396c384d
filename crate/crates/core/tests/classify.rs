use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tftlab::bordism::{Bordism, Component};
use tftlab::bundle::random::{random_bundle, random_compatible_bundle, random_loop, random_path};
use tftlab::bundle::{BundleData, DomainBox, PathData};
use tftlab::classify::*;
use tftlab::numerics::{DenseMatrix, Sign};
use tftlab::tft::{evaluate, TftData};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn generator() -> DenseMatrix {
    DenseMatrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]])
}

fn rotation() -> TftData {
    let omega = [generator(), DenseMatrix::zeros(2, 2)];
    let b = BundleData::constant(&omega, &DenseMatrix::identity(2), DomainBox::cube(2, 1.0)).unwrap();
    TftData::new(b).unwrap()
}

fn flat(beta: &DenseMatrix) -> TftData {
    TftData::new(BundleData::flat_with_form(beta, DomainBox::cube(2, 1.0)).unwrap()).unwrap()
}

#[test]
fn preflight_accepts_a_genuine_theory() {
    let report = preflight(&TftBackedOracle::new(rotation()), 1).unwrap();
    assert!(report.passed(), "{report}");
    assert_eq!(report.checks.len(), 3);
}

#[test]
fn preflight_names_the_violated_hypothesis() {
    let zero = ZeroTransportOracle {
        inner: TftBackedOracle::new(rotation()),
        window: (0.45, 0.55),
    };
    let report = preflight(&zero, 1).unwrap();
    assert!(report.violated().contains(&INVERTIBILITY), "{report}");

    let buggy = CompositionBugOracle {
        inner: TftBackedOracle::new(rotation()),
        strength: 1e-3,
    };
    let report = preflight(&buggy, 1).unwrap();
    assert!(report.violated().contains(&MULTIPLICATIVITY), "{report}");
    let check = report.check(MULTIPLICATIVITY).unwrap();
    assert!(check.detail.starts_with("split"), "{}", check.detail);

    let err = reconstruct(&buggy, ReconstructionSettings::default()).unwrap_err();
    assert!(err.to_string().contains(MULTIPLICATIVITY), "{err}");
}

#[test]
fn flat_oracle_reconstructs_exactly() {
    let o = TftBackedOracle::new(flat(&DenseMatrix::identity(2)));
    let w = reconstruct_connection(&o, &[0.2, -0.3], &[1.0, 0.5], DEFAULT_STEP).unwrap();
    assert!(w.max_abs() <= 1e-10, "{}", w.max_abs());

    let rec = reconstruct(&o, ReconstructionSettings::default()).unwrap();
    let mut r = rng(2);
    let samples: Vec<Bordism> = (0..10)
        .map(|_| {
            let p = random_path(&mut r, o.domain());
            Bordism::single(Component::standard(p, &[0.0, 1.0]).unwrap()).unwrap()
        })
        .collect();
    let rt = compare_on(&o, &rec.theory, &samples).unwrap();
    assert!(rt.max_deviation <= 1e-10, "{}", rt.max_deviation);
}

#[test]
fn rotation_generator_is_recovered() {
    let o = TftBackedOracle::new(rotation());
    for x in [[0.0, 0.0], [0.4, -0.6]] {
        let w = reconstruct_connection(&o, &x, &[1.0, 0.0], 1e-4).unwrap();
        assert!(w.distance(&generator()) <= 1e-7, "{}", w.distance(&generator()));
        let w = reconstruct_connection(&o, &x, &[0.0, 1.0], 1e-4).unwrap();
        assert!(w.max_abs() <= 1e-7);
    }
}

#[test]
fn halving_the_step_quarters_the_error() {
    let mut r = rng(3);
    let b = random_compatible_bundle(&mut r, 2, 2).unwrap();
    let o = TftBackedOracle::new(TftData::new(b.clone()).unwrap().with_rtol(1e-12));
    let study = convergence_study(&o, &b, &[2e-4, 1e-4], DEFAULT_DEGREE).unwrap();
    let ratio = study.errors[0] / study.errors[1];
    assert!((3.5..=4.5).contains(&ratio), "{:?}", study.errors);
}

#[test]
fn steps_below_the_floor_are_rejected() {
    let o = TftBackedOracle::new(rotation());
    assert!(reconstruct_connection(&o, &[0.0, 0.0], &[1.0, 0.0], 1e-9).is_err());
    let settings = ReconstructionSettings {
        step: 5e-9,
        ..Default::default()
    };
    assert!(reconstruct(&o, settings).is_err());
}

#[test]
fn extracted_forms_and_signatures() {
    let o = TftBackedOracle::new(flat(&DenseMatrix::identity(2)));
    let f = extract_form(&o, &[0.1, 0.1]).unwrap();
    assert_eq!(f.beta, DenseMatrix::identity(2));
    assert_eq!(f.basis.signs, vec![Sign::Plus, Sign::Plus]);
    assert!(f.copairing_residual <= 1e-8);

    let o = TftBackedOracle::new(flat(&DenseMatrix::diagonal(&[1.0, -1.0])));
    let f = extract_form(&o, &[0.1, 0.1]).unwrap();
    assert_eq!(f.basis.signs, vec![Sign::Plus, Sign::Minus]);
    assert!(f.copairing_residual <= 1e-8);

    let rec = reconstruct(&o, ReconstructionSettings::default()).unwrap();
    assert_eq!(rec.report.signature_string().as_deref(), Some("+-"));
}

#[test]
fn round_trip_on_mixed_bordisms() {
    let mut r = rng(4);
    let z = TftData::new(random_compatible_bundle(&mut r, 2, 2).unwrap()).unwrap();
    let rec = roundtrip(&TftBackedOracle::new(z), ReconstructionSettings::default(), 20).unwrap();
    let rt = rec.report.roundtrip.as_ref().unwrap();
    assert_eq!(rt.deviations.len(), 20);
    assert!(rt.max_deviation <= ROUNDTRIP_TOLERANCE, "{}", rt.max_deviation);
    assert!(rec.report.compatibility.as_ref().unwrap().passed());
}

#[test]
fn oriented_round_trip_without_a_form() {
    let mut r = rng(5);
    let z = TftData::unchecked(random_bundle(&mut r, 2, 2).unwrap(), 1e-9).unwrap();
    let o = TftBackedOracle::oriented(z);
    assert!(!o.has_elbows());
    let rec = roundtrip(&o, ReconstructionSettings::default(), 20).unwrap();
    assert!(rec.report.beta.is_none());
    let rt = rec.report.roundtrip.as_ref().unwrap();
    assert!(rt.max_deviation <= ROUNDTRIP_TOLERANCE, "{}", rt.max_deviation);
}

#[test]
fn gauge_equivalent_oracles_give_gauge_equivalent_theories() {
    let mut r = rng(6);
    let b = random_compatible_bundle(&mut r, 2, 2).unwrap();
    let alpha = DenseMatrix::from_rows(&[vec![1.2, 0.3], vec![-0.4, 0.9]]);
    let inv = alpha.inverse().unwrap();
    let b2 = b.gauge_transform(&alpha).unwrap();
    let z1 = reconstruct(&TftBackedOracle::new(TftData::new(b).unwrap()), Default::default())
        .unwrap()
        .theory;
    let z2 = reconstruct(&TftBackedOracle::new(TftData::new(b2).unwrap()), Default::default())
        .unwrap()
        .theory;
    let domain = z1.bundle().domain().clone();

    for _ in 0..3 {
        let p = random_path(&mut r, &domain);
        let seg = Bordism::single(Component::standard(p.clone(), &[0.0, 1.0]).unwrap()).unwrap();
        let p1 = evaluate(&z1, &seg).unwrap().matrix;
        let p2 = evaluate(&z2, &seg).unwrap().matrix;
        let expect = &(&alpha * &p1) * &inv;
        assert!(p2.distance(&expect) <= 1e-6, "{}", p2.distance(&expect));

        let lp = random_loop(&mut r, &domain);
        let circle = Bordism::single(Component::circle(lp).unwrap()).unwrap();
        let t1 = evaluate(&z1, &circle).unwrap().scalar().unwrap();
        let t2 = evaluate(&z2, &circle).unwrap().scalar().unwrap();
        assert!((t1 - t2).abs() <= 1e-6, "{t1} vs {t2}");
    }

    let x = domain.center();
    let elbow = Bordism::single(Component::right_elbow(PathData::constant(&x), 0.0, 1.0).unwrap()).unwrap();
    let reshape = |m: &DenseMatrix| DenseMatrix::from_fn(2, 2, |i, j| m.as_slice()[2 * i + j]);
    let m1 = reshape(&evaluate(&z1, &elbow).unwrap().matrix);
    let m2 = reshape(&evaluate(&z2, &elbow).unwrap().matrix);
    let expect = &(&inv.transpose() * &m1) * &inv;
    assert!(m2.distance(&expect) <= 1e-6, "{}", m2.distance(&expect));
}

#[test]
fn report_summary_is_sorted() {
    let rec = reconstruct(&TftBackedOracle::new(rotation()), Default::default()).unwrap();
    let keys: Vec<String> = rec.report.summary().into_iter().map(|(k, _)| k).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(keys.iter().any(|k| k == "preflight"));
    assert_eq!(rec.report.table().lines().count(), rec.report.points.len() + 1);
}
