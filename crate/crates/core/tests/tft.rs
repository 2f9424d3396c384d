use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tftlab::bordism::{
    insert_sitting_instants, point_signs, simplicial_map, Bordism, Component, Orientation, PointSign,
};
use tftlab::bundle::random::{random_compatible_bundle, random_loop, random_path};
use tftlab::bundle::{parallel_transport, BundleData, DomainBox, PathData};
use tftlab::numerics::DenseMatrix;
use tftlab::tft::{
    elbow_midpoint_invariance, evaluate, evaluate_oriented, snake_check, snake_check_oriented, swap_elbow, swap_matrix,
    FactorKind, TftData,
};

fn flat(beta: &DenseMatrix) -> TftData {
    TftData::new(BundleData::flat_with_form(beta, DomainBox::cube(2, 1.0)).unwrap()).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn thin_standard_is_identity() {
    let mut r = rng(1);
    let z = TftData::new(random_compatible_bundle(&mut r, 2, 2).unwrap()).unwrap();
    let path = random_path(&mut r, z.bundle().domain());
    let b = Bordism::single(Component::standard(path, &[0.3, 0.3]).unwrap()).unwrap();
    let v = evaluate(&z, &b).unwrap();
    assert_eq!(v.matrix, DenseMatrix::identity(2));
}

#[test]
fn constant_right_elbow_is_the_form() {
    let beta = DenseMatrix::diagonal(&[4.0, -9.0]);
    let z = flat(&beta);
    let b = Bordism::single(Component::right_elbow(PathData::constant(&[0.1, 0.2]), 0.0, 1.0).unwrap()).unwrap();
    let v = evaluate(&z, &b).unwrap();
    assert_eq!(v.domain, vec![FactorKind::Vector; 2]);
    assert_eq!(v.matrix.as_slice(), beta.as_slice());
}

#[test]
fn flat_circle_is_rank() {
    let z = flat(&DenseMatrix::identity(3));
    let mut r = rng(2);
    let lp = random_loop(&mut r, &DomainBox::cube(2, 1.0));
    let v = evaluate(&z, &Bordism::single(Component::circle(lp).unwrap()).unwrap()).unwrap();
    assert_eq!(v.scalar(), Some(3.0));
}

#[test]
fn snake_identities() {
    let z = flat(&DenseMatrix::diagonal(&[4.0, -9.0]));
    let p = PathData::constant(&[0.0, 0.0]);
    assert!(snake_check(&z, &p, 0.0, 1.0).unwrap() <= 1e-12);
    let mut r = rng(3);
    for _ in 0..5 {
        let z = TftData::new(random_compatible_bundle(&mut r, 2, 2).unwrap()).unwrap();
        let p = random_path(&mut r, z.bundle().domain());
        let res = snake_check(&z, &p, 0.0, 1.0).unwrap();
        assert!(res <= 1e-8, "{res}");
        let res = snake_check_oriented(&z, &p, 0.0, 1.0).unwrap();
        assert!(res <= 1e-8, "{res}");
    }
}

#[test]
fn elbow_point_signs() {
    let p = PathData::constant(&[0.0]);
    let right = Component::right_elbow(p.clone(), 0.0, 1.0)
        .unwrap()
        .with_orientation(Orientation::Positive);
    let b = Bordism::single(right).unwrap();
    assert_eq!(
        point_signs(&b, 0).unwrap(),
        vec![PointSign::Positive, PointSign::Negative]
    );
    let std = Component::standard(p, &[0.0])
        .unwrap()
        .with_orientation(Orientation::Negative);
    assert_eq!(
        point_signs(&Bordism::single(std).unwrap(), 0).unwrap(),
        vec![PointSign::Negative]
    );
}

#[test]
fn swap_and_midpoint_and_segal() {
    let mut r = rng(4);
    let z = TftData::new(random_compatible_bundle(&mut r, 2, 2).unwrap()).unwrap();
    let p = random_path(&mut r, z.bundle().domain());
    let e = Component::right_elbow(p.clone(), 0.0, 1.0).unwrap();
    let v = evaluate(&z, &Bordism::single(e.clone()).unwrap()).unwrap();
    let s = evaluate(&z, &Bordism::single(swap_elbow(&e, 0.0, 1.0).unwrap()).unwrap()).unwrap();
    let flipped = &v.matrix * &swap_matrix(2);
    assert!(s.matrix.distance(&flipped) <= 1e-8);
    assert!(elbow_midpoint_invariance(&z, &e, 0.3, 0.7).unwrap() <= 1e-8);

    let b = Bordism::single(Component::standard(p.clone(), &[0.0, 0.4, 1.0]).unwrap()).unwrap();
    let whole = evaluate(&z, &simplicial_map(&b, &[0, 2]).unwrap()).unwrap();
    let f1 = evaluate(&z, &simplicial_map(&b, &[0, 1]).unwrap()).unwrap();
    let f2 = evaluate(&z, &simplicial_map(&b, &[1, 2]).unwrap()).unwrap();
    assert!(whole.matrix.distance(&(&f2.matrix * &f1.matrix)) <= 1e-8);
    let direct = parallel_transport(z.bundle(), &p, 0.0, 1.0).unwrap();
    assert!(whole.matrix.distance(&direct) <= 1e-12);

    let sit = insert_sitting_instants(&b).unwrap();
    let v2 = evaluate(&z, &sit).unwrap();
    let v1 = evaluate(&z, &b).unwrap();
    assert!(
        v1.matrix.distance(&v2.matrix) <= 1e-8,
        "{}",
        v1.matrix.distance(&v2.matrix)
    );
}

#[test]
fn oriented_negative_interval_is_inverse_transpose() {
    let mut r = rng(5);
    let z = TftData::new(random_compatible_bundle(&mut r, 2, 2).unwrap()).unwrap();
    let p = random_path(&mut r, z.bundle().domain());
    let c = Component::standard(p.clone(), &[0.0, 1.0]).unwrap();
    let pos = evaluate_oriented(
        &z,
        &Bordism::single(c.clone().with_orientation(Orientation::Positive)).unwrap(),
    )
    .unwrap();
    let neg = evaluate_oriented(&z, &Bordism::single(c.with_orientation(Orientation::Negative)).unwrap()).unwrap();
    assert_eq!(neg.domain, vec![FactorKind::Dual]);
    let expect = pos.matrix.inverse().unwrap().transpose();
    assert!(neg.matrix.distance(&expect) <= 1e-12);
}
