use proptest::prelude::*;

use tftlab::bordism::*;
use tftlab::bundle::{PathData, Reparametrization};
use tftlab::numerics::{parse_expr, Assignment, SmoothExpr};

fn line() -> PathData {
    PathData::line(&[0.0, 0.0], &[1.0, 0.5])
}

fn standard(taus: &[f64]) -> Bordism {
    Bordism::single(Component::standard(line(), taus).unwrap()).unwrap()
}

fn piece(lo: f64, hi: f64) -> Piece {
    Piece { lo, hi, closed: false }
}

fn cut_values(b: &Bordism, t: f64) -> Vec<f64> {
    b.components[0]
        .cuts
        .iter()
        .map(|c| c.eval(&Assignment::new().with_t(t)).unwrap())
        .collect()
}

#[test]
fn ordering_violations_are_reported() {
    let err = Component::standard(line(), &[0.5, 0.2]).unwrap_err();
    assert!(err.to_string().contains("cut ordering"), "{err}");

    let t = SmoothExpr::t();
    let swapped = Component::general(line(), vec![t.clone() - 0.5, t], Window::Interval(-1.0, 2.0));
    let err = Bordism::single(swapped).unwrap_err();
    assert!(err.to_string().contains("cut ordering"), "{err}");
}

#[test]
fn tangential_and_circle_cuts_are_rejected() {
    let t = SmoothExpr::t();
    let touching = SmoothExpr::powi(&(t.clone() - 0.5), 2);
    let c = Component::general(
        line(),
        vec![touching, SmoothExpr::constant(-1.0)],
        Window::Interval(0.0, 1.0),
    );
    let err = Bordism::single(c).unwrap_err();
    assert!(err.to_string().contains("transversality"), "{err}");

    let lp = PathData::new(vec![parse_expr("cos(t)").unwrap(), parse_expr("sin(t)").unwrap()])
        .unwrap()
        .with_period(2.0 * std::f64::consts::PI, &[])
        .unwrap();
    let c = Component::general(
        lp,
        vec![SmoothExpr::sin(&t), SmoothExpr::constant(-2.0)],
        Window::Periodic(2.0 * std::f64::consts::PI),
    );
    let err = Bordism::single(c).unwrap_err();
    assert!(err.to_string().contains("must not vanish"), "{err}");
}

#[test]
fn elbows_need_a_proper_interval() {
    for (a, b) in [(0.5, 0.5), (1.0, 0.0)] {
        let err = Component::right_elbow(line(), a, b).unwrap_err();
        assert!(err.to_string().contains("a < b required"), "{err}");
        let err = Component::left_elbow(line(), a, b).unwrap_err();
        assert!(err.to_string().contains("a < b required"), "{err}");
    }
}

#[test]
fn core_interval_examples() {
    let b = standard(&[0.0, 0.4, 1.0]);
    let pieces = |a, c| -> Vec<Piece> { core_intervals(&b, a, c).unwrap().into_iter().map(|p| p.piece).collect() };
    assert_eq!(pieces(0, 2), vec![piece(0.0, 1.0)]);
    assert_eq!(pieces(0, 1), vec![piece(0.0, 0.4)]);
    assert_eq!(pieces(1, 1), vec![piece(0.4, 0.4)]);
    assert!(pieces(1, 1)[0].is_point());

    let right = Bordism::single(Component::right_elbow(line(), 0.0, 1.0).unwrap()).unwrap();
    let incoming: Vec<Piece> = core_intervals(&right, 0, 0)
        .unwrap()
        .into_iter()
        .map(|p| p.piece)
        .collect();
    assert_eq!(incoming.len(), 2);
    for (got, end) in incoming.iter().zip([0.0, 1.0]) {
        assert!(got.is_point() && (got.lo - end).abs() <= 1e-10, "{got:?}");
    }
    assert!(core_intervals(&right, 1, 1).unwrap().is_empty());
    let whole: Vec<Piece> = core_intervals(&right, 0, 1)
        .unwrap()
        .into_iter()
        .map(|p| p.piece)
        .collect();
    assert_eq!(whole.len(), 1);
    assert!((whole[0].lo - 0.0).abs() <= 1e-10 && (whole[0].hi - 1.0).abs() <= 1e-10);

    let lp = PathData::new(vec![parse_expr("cos(t)").unwrap(), parse_expr("sin(t)").unwrap()])
        .unwrap()
        .with_period(2.0 * std::f64::consts::PI, &[])
        .unwrap();
    let both = right
        .disjoint_union(&Bordism::single(Component::circle(lp).unwrap()).unwrap())
        .unwrap();
    let all = core_intervals(&both, 0, 1).unwrap();
    assert_eq!(all.iter().map(|c| c.component).collect::<Vec<_>>(), vec![0, 1]);
    assert!(all[1].piece.closed);

    assert!(core_intervals(&b, 2, 1).is_err());
}

#[test]
fn point_sign_examples() {
    let left = Component::left_elbow(line(), 0.0, 1.0)
        .unwrap()
        .with_orientation(Orientation::Positive);
    let b = Bordism::single(left).unwrap();
    assert_eq!(
        point_signs(&b, 1).unwrap(),
        vec![PointSign::Negative, PointSign::Positive]
    );

    let s = standard(&[0.0, 1.0]);
    assert!(point_signs(&s, 0).is_err());
    let s = s.with_orientation(Orientation::Positive);
    assert_eq!(point_signs(&s, 1).unwrap(), vec![PointSign::Positive]);
}

#[test]
fn simplicial_map_examples() {
    let b = standard(&[0.0, 0.4, 1.0]);
    assert_eq!(simplicial_map(&b, &[0, 1, 2]).unwrap(), b);
    let face = simplicial_map(&b, &[0, 2]).unwrap();
    assert_eq!(cut_values(&face, 0.5), vec![0.5, -0.5]);
    let degenerate = simplicial_map(&b, &[0, 1, 1, 2]).unwrap();
    let values = cut_values(&degenerate, 0.5);
    for (g, e) in values.iter().zip([0.5, 0.1, 0.1, -0.5]) {
        assert!((g - e).abs() <= 1e-15);
    }
    assert!(degenerate.validate().is_ok());

    assert!(simplicial_map(&b, &[]).is_err());
    assert!(simplicial_map(&b, &[1, 0]).is_err());
    assert!(simplicial_map(&b, &[0, 3]).is_err());
}

fn monotone(len: std::ops::RangeInclusive<usize>, top: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..=top, len).prop_map(|mut v| {
        v.sort();
        v
    })
}

proptest! {
    #[test]
    fn simplicial_maps_compose(
        taus in prop::collection::vec(-1.0..1.0f64, 1..5),
        k1 in monotone(1..=4, 10),
        k2 in monotone(1..=4, 10),
    ) {
        let mut taus = taus;
        taus.sort_by(f64::total_cmp);
        let b = standard(&taus);
        let n = taus.len();
        let k1: Vec<usize> = k1.into_iter().map(|k| k % n).collect::<Vec<_>>();
        let mut k1 = k1;
        k1.sort();
        let m = k1.len();
        let mut k2: Vec<usize> = k2.into_iter().map(|k| k % m).collect();
        k2.sort();
        let composite: Vec<usize> = k2.iter().map(|&j| k1[j]).collect();
        let lhs = simplicial_map(&simplicial_map(&b, &k1).unwrap(), &k2).unwrap();
        let rhs = simplicial_map(&b, &composite).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn modification_kinds() {
    let bump = standard_bump(0.2, 0.8);
    let cases = [
        (ModificationKind::TwoSided, 0.0, 1.0),
        (ModificationKind::Left, 0.0, 0.9),
        (ModificationKind::Right, 0.1, 1.0),
    ];
    for (kind, near_a, near_b) in cases {
        let chi = build_modification(kind, 0.0, 1.0, &bump, (0.2, 0.8)).unwrap();
        chi.check_invariants().unwrap();
        assert_eq!(chi.value(0.0).unwrap(), 0.0);
        assert!((chi.value(1.0).unwrap() - 1.0).abs() <= 1e-12);
        assert!((chi.value(0.1).unwrap() - near_a).abs() <= 1e-12, "{kind:?}");
        assert!((chi.value(0.9).unwrap() - near_b).abs() <= 1e-12, "{kind:?}");
        let ts: Vec<f64> = (0..=50).map(|k| k as f64 / 50.0).collect();
        for w in ts.windows(2) {
            assert!(chi.value(w[1]).unwrap() >= chi.value(w[0]).unwrap());
        }
    }

    let chi = standard_two_sided(2.0, 4.0).unwrap();
    chi.check_invariants().unwrap();
    assert_eq!(chi.value(2.2).unwrap(), 2.0);
    assert!((chi.value(3.8).unwrap() - 4.0).abs() <= 1e-12);
    assert_eq!(chi.derivative(2.2).unwrap(), 0.0);
}

#[test]
fn modification_preconditions() {
    let bump = standard_bump(0.2, 0.8);
    assert!(build_modification(ModificationKind::TwoSided, 0.0, 1.0, &bump, (0.0, 0.8)).is_err());
    let negative = SmoothExpr::sin(&(SmoothExpr::t() * 20.0));
    let err = build_modification(ModificationKind::Left, 0.0, 1.0, &negative, (0.2, 0.8)).unwrap_err();
    assert!(err.to_string().contains("negative"), "{err}");
    let err = build_modification(ModificationKind::Left, 0.0, 1.0, &SmoothExpr::s(), (0.2, 0.8)).unwrap_err();
    assert!(err.to_string().contains("only depend on t"), "{err}");
}

#[test]
fn composition_of_modifications() {
    let bump = standard_bump(0.2, 0.8);
    let left = build_modification(ModificationKind::Left, 0.0, 1.0, &bump, (0.2, 0.8)).unwrap();
    let right = build_modification(ModificationKind::Right, 0.0, 1.0, &bump, (0.2, 0.8)).unwrap();
    let both = left.compose(&right).unwrap();
    assert_eq!(both.kind, ModificationKind::TwoSided);
    both.check_invariants().unwrap();
    for t in [0.05, 0.3, 0.6, 0.95] {
        let expect = left.value(right.value(t).unwrap()).unwrap();
        assert_eq!(both.value(t).unwrap(), expect);
    }
    let other = standard_two_sided(0.0, 2.0).unwrap();
    assert!(left.compose(&other).is_err());
}

#[test]
fn sitting_instants_stop_the_path_at_cuts() {
    let b = standard(&[0.0, 0.5, 1.0]);
    let sit = insert_sitting_instants(&b).unwrap();
    assert_eq!(sit.components[0].cuts, b.components[0].cuts);
    let path = &sit.components[0].path;
    for tau in [0.0, 0.5, 1.0] {
        assert_eq!(path.point(tau).unwrap(), line().point(tau).unwrap());
        assert!(path.velocity(tau).unwrap().iter().all(|v| *v == 0.0));
    }
    for t in [0.02, 0.48, 0.53, 0.97] {
        assert!(path.velocity(t).unwrap().iter().all(|v| *v == 0.0), "t = {t}");
    }
    assert!(path.velocity(0.25).unwrap()[0] > 0.0);

    let thin = standard(&[0.3, 0.3]);
    assert_eq!(insert_sitting_instants(&thin).unwrap(), thin);
    let elbow = Bordism::single(Component::right_elbow(line(), 0.0, 1.0).unwrap()).unwrap();
    assert!(insert_sitting_instants(&elbow).is_err());
}

fn family(lo: f64, hi: f64) -> Family {
    Family::from_bordism(&standard(&[0.0, 1.0]), &Family::grid(lo, hi, 7)).unwrap()
}

fn partition() -> (SmoothExpr, SmoothExpr) {
    let chi1 = parse_expr("(1 + cos((s - 0.8) * 3.141592653589793 / 0.4)) / 2").unwrap();
    let chi2 = SmoothExpr::one() - chi1.clone();
    (chi1, chi2)
}

#[test]
fn gluing_a_family_with_itself_changes_nothing() {
    let (f1, f2) = (family(0.0, 1.2), family(0.8, 2.0));
    let (chi1, chi2) = partition();
    let overlap = Overlap {
        transition: SmoothExpr::t(),
        chi1,
        chi2,
    };
    let glued = glue_family(&f1, &f2, &overlap).unwrap();
    assert_eq!(glued.fibers.len(), 11);
    let reference = standard(&[0.0, 1.0]);
    for (s, b) in &glued.fibers {
        for t in [-0.1, 0.3, 0.9] {
            let got = cut_values(b, t);
            let expect = cut_values(&reference, t);
            for (g, e) in got.iter().zip(&expect) {
                assert!((g - e).abs() <= 1e-14, "s = {s}, t = {t}");
            }
        }
    }
}

#[test]
fn unit_weight_keeps_the_first_chart() {
    let f1 = family(0.0, 1.2);
    let shifted = Family::from_bordism(&standard(&[0.1, 1.1]), &Family::grid(0.8, 2.0, 7)).unwrap();
    let overlap = Overlap {
        transition: SmoothExpr::t() + 0.1,
        chi1: SmoothExpr::one(),
        chi2: SmoothExpr::constant(0.0),
    };
    let glued = glue_family(&f1, &shifted, &overlap).unwrap();
    for (s, b) in &glued.fibers {
        let expect = if *s <= 1.2 + 1e-12 {
            f1.fiber(*s)
        } else {
            shifted.fiber(*s)
        };
        assert_eq!(Some(b), expect, "s = {s}");
    }

    let bad = Overlap {
        transition: SmoothExpr::t(),
        chi1: SmoothExpr::constant(0.7),
        chi2: SmoothExpr::constant(0.2),
    };
    let err = glue_family(&f1, &shifted, &bad).unwrap_err();
    assert!(err.to_string().contains("partition of unity"), "{err}");
    let bad = Overlap {
        transition: SmoothExpr::t(),
        chi1: SmoothExpr::t(),
        chi2: SmoothExpr::one(),
    };
    assert!(glue_family(&f1, &shifted, &bad).is_err());
}

#[test]
fn families_validate_every_fiber() {
    let tau = parse_expr("1 - s").unwrap();
    let c = Component::standard_family(line(), vec![SmoothExpr::constant(0.0), tau], &[0.0, 0.5]).unwrap();
    let b = Bordism::unchecked(vec![c]).unwrap();
    assert!(b.depends_on_s());
    let ok = Family::from_bordism(&b, &Family::grid(0.0, 0.5, 3)).unwrap();
    assert_eq!(ok.parameters(), vec![0.0, 0.25, 0.5]);
    assert_eq!(cut_values(ok.fiber(0.5).unwrap(), 0.0), vec![0.0, -0.5]);
    let bordism = Bordism::new(b.components.clone());
    assert!(bordism.is_ok());
    let err = Family::from_bordism(&b, &[1.5]).unwrap_err();
    assert!(err.to_string().contains("fiber s = 1.5"), "{err}");
}
