mod common;

use common::*;
use flatjet::calculus::{AxisBox, JetOracle};
use flatjet::jets::{enumerate_multiindices, Smoothness};
use flatjet::norms::whitney_field_norm_parts;
use flatjet::whitney::*;
use flatjet::{Jet, WhitneyField};
use rand::Rng;

fn s2() -> Smoothness {
    Smoothness::new(2.0).unwrap()
}

#[test]
fn two_point_field() {
    let field = WhitneyField::new(vec![
        Jet::zero(vec![0.0], 1),
        Jet::constant(vec![1.0], 1, 1.0),
    ])
    .unwrap();
    let ext = whitney_extend(&field, s2(), &unit_box(1)).unwrap();
    assert_eq!(ext.jet(&[0.0], 0).unwrap().value(), 0.0);
    assert!((ext.jet(&[1.0], 0).unwrap().value() - 1.0).abs() < 1e-12);
    for i in 0..=4000 {
        let x = -0.5 + 2.0 * i as f64 / 4000.0;
        let v = ext.jet(&[x], 0).unwrap().value();
        assert!((0.0..=1.0 + 1e-9).contains(&v), "F({x}) = {v}");
    }
}

#[test]
fn constant_field_stays_below_the_constant() {
    let c = 0.7;
    let points = [[0.2, 0.3], [0.6, 0.3], [0.4, 0.9]];
    let field = WhitneyField::new(points.iter().map(|p| Jet::constant(p.to_vec(), 1, c)).collect()).unwrap();
    let ext = whitney_extend(&field, s2(), &unit_box(2)).unwrap();
    let mut r = rng(3);
    for p in &points {
        assert!((ext.jet(p, 0).unwrap().value() - c).abs() <= 1e-12 * c);
    }
    for _ in 0..2000 {
        let x = [r.gen_range(-0.4..1.4), r.gen_range(-0.4..1.4)];
        let v = ext.jet(&x, 0).unwrap().value();
        assert!(v >= 0.0 && v <= c * (1.0 + 1e-9), "F({x:?}) = {v}");
    }
}

#[test]
fn extension_jets_match_finite_differences() {
    let mut r = rng(4);
    let s = Smoothness::new(2.5).unwrap();
    for _ in 0..3 {
        let field = random_field(&mut r, 2, 3, s);
        let ext = whitney_extend(&field, s, &unit_box(2)).unwrap();
        let f = |y: &[f64]| ext.jet(y, 0).unwrap().value();
        let mut checked = 0;
        while checked < 30 {
            let x = [r.gen_range(-0.3..1.3), r.gen_range(-0.3..1.3)];
            let jet = extension_jet(&ext, &x, 2).unwrap();
            if jet.is_zero() {
                continue;
            }
            checked += 1;
            let scale = jet.order_norms().iter().cloned().fold(0.0, f64::max);
            for alpha in enumerate_multiindices(2, 2) {
                let fd = fd_derivative(&f, &x, alpha.entries(), 1e-5);
                let exact = jet.coeff(&alpha);
                assert!(
                    (fd - exact).abs() <= 1e-4 * scale.max(1e-3),
                    "∂^{alpha} at {x:?}: {exact} vs {fd}"
                );
            }
        }
    }
}

#[test]
fn taylor_round_trip_reproduces_norms() {
    let mut r = rng(5);
    for s in [1.5, 2.0, 2.5, 3.5] {
        let s = Smoothness::new(s).unwrap();
        for n in [1, 2] {
            let field = random_field(&mut r, n, 4, s);
            let ext = whitney_extend(&field, s, &unit_box(n)).unwrap();
            let back = WhitneyField::new(
                field
                    .points()
                    .iter()
                    .map(|x| extension_jet(&ext, x, s.floor()).unwrap())
                    .collect(),
            )
            .unwrap();
            let a = whitney_field_norm_parts(&field, s).unwrap().total();
            let b = whitney_field_norm_parts(&back, s).unwrap().total();
            assert!((a - b).abs() <= 1e-6 * a.max(1.0), "s = {}, n = {n}: {a} vs {b}", s.s());
        }
    }
}

#[test]
fn partition_of_unity_properties() {
    let mut r = rng(6);
    for n in 1..=3 {
        let points: Vec<Vec<f64>> = (0..5).map(|_| (0..n).map(|_| r.gen_range(0.0..1.0)).collect()).collect();
        let pou = build_pou(std::sync::Arc::new(whitney_decompose(&points, &unit_box(n)).unwrap()));
        for _ in 0..1000 {
            let x: Vec<f64> = (0..n).map(|_| r.gen_range(-0.4..1.4)).collect();
            let thetas = pou.thetas(&x, 0).unwrap();
            assert!(thetas.len() <= 1 << n);
            let sum: f64 = thetas.iter().map(|(_, t)| t.value()).sum();
            assert!((sum - 1.0).abs() < 1e-12);
            assert!(thetas.iter().all(|(_, t)| (0.0..=1.0 + 1e-15).contains(&t.value())));
        }
    }
}

#[test]
fn uncovered_points_are_errors() {
    let field = WhitneyField::new(vec![Jet::constant(vec![0.5], 1, 1.0)]).unwrap();
    let ext = whitney_extend(&field, s2(), &AxisBox::cube(1, 0.0, 1.0)).unwrap();
    let far = 1e6;
    assert!(extension_jet(&ext, &[far], 1).is_err());
}
