mod common;

use common::{brute_force_surrogate_1d_s2, fornberg_weights, rng};
use flatjet::finiteness::{
    finiteness_scan, fuzz_whitney_convexity, gamma_f_member, summarize, surrogate_local_norm,
    verify_witness, ScanOptions, ShapeFieldSpec, SurrogateOptions,
};
use flatjet::jets::Smoothness;
use rand::Rng;

fn s2() -> Smoothness {
    Smoothness::new(2.0).unwrap()
}

#[test]
fn fornberg_weights_are_exact_on_polynomials() {
    let xs = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let w = fornberg_weights(0.0, &xs, 2);
    let expect = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
    for (a, b) in w.iter().zip(expect) {
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn brute_force_two_point_example() {
    // f = (0, 1) at {0, 1}: slope 1 at x = 1 gives norm 1, and 1 is forced
    let v = brute_force_surrogate_1d_s2(&[0.0, 1.0], &[0.0, 1.0]);
    assert!((v - 1.0).abs() < 1e-9, "{v}");
}

#[test]
fn surrogate_matches_brute_force_on_small_sets() {
    let mut r = rng(11);
    for trial in 0..30 {
        let size = 1 + trial % 3;
        let mut xs: Vec<f64> = (0..size).map(|_| r.gen_range(0.0..1.0)).collect();
        xs.sort_by(f64::total_cmp);
        let fs: Vec<f64> = xs
            .iter()
            .map(|_| if r.gen_bool(0.2) { 0.0 } else { r.gen_range(0.0..1.0) })
            .collect();
        let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let got = surrogate_local_norm(&pts, &fs, s2(), None, SurrogateOptions::default())
            .unwrap()
            .value;
        let want = brute_force_surrogate_1d_s2(&xs, &fs);
        assert!(got >= want * (1.0 - 1e-9), "{xs:?} {fs:?}: {got} < {want}");
        assert!(got <= want * 1.02, "{xs:?} {fs:?}: {got} vs {want}");
    }
}

#[test]
fn surrogate_is_monotone_under_inclusion() {
    let mut r = rng(5);
    for _ in 0..10 {
        let pts: Vec<Vec<f64>> = (0..5).map(|i| vec![0.2 * i as f64 + r.gen_range(0.0..0.15)]).collect();
        let fs: Vec<f64> = pts.iter().map(|p| p[0] * p[0]).collect();
        let full = surrogate_local_norm(&pts, &fs, s2(), None, SurrogateOptions::default()).unwrap();
        let sub = surrogate_local_norm(&pts[..3], &fs[..3], s2(), None, SurrogateOptions::default())
            .unwrap();
        assert!(sub.value <= full.value * (1.0 + 2e-3), "{} > {}", sub.value, full.value);
    }
}

#[test]
fn scan_samples_of_square() {
    for seed in 0..3 {
        let mut r = rng(seed);
        let pts: Vec<Vec<f64>> = (0..8).map(|_| vec![r.gen_range(0.0..1.0)]).collect();
        let fs: Vec<f64> = pts.iter().map(|p| p[0] * p[0]).collect();
        let spec = ShapeFieldSpec::new(pts, fs, s2()).unwrap();
        let rep = finiteness_scan(&spec, ScanOptions::default()).unwrap();
        assert!(rep.ratio >= 1.0);
        assert!(rep.ratio < 10.0, "{}", rep.ratio);
        assert_eq!(rep.k, 4);
    }
}

#[test]
fn gamma_f_is_monotone_in_m() {
    let mut r = rng(3);
    for _ in 0..500 {
        let v: f64 = r.gen_range(0.0..1.0);
        let b: f64 = r.gen_range(-2.0..2.0);
        let jet = flatjet::Jet::from_slices(&[0.0], 1, &[(&[0], v), (&[1], b)]).unwrap();
        let m: f64 = r.gen_range(0.0..3.0);
        if gamma_f_member(&jet, &[0.0], m, v, s2()).unwrap() {
            assert!(gamma_f_member(&jet, &[0.0], m * 1.5, v, s2()).unwrap());
        }
    }
}

#[test]
fn fuzz_measured_constant_is_stable() {
    let spec = ShapeFieldSpec::new(
        vec![vec![0.0], vec![0.3], vec![0.9]],
        vec![0.5, 0.01, 1.0],
        s2(),
    )
    .unwrap();
    let maxima: Vec<f64> = (0..3)
        .map(|seed| {
            let w = fuzz_whitney_convexity(&spec, 500, seed).unwrap();
            for x in &w {
                verify_witness(x, s2()).unwrap();
            }
            summarize(&w).max_measured_c
        })
        .collect();
    let hi = maxima.iter().cloned().fold(0.0, f64::max);
    let lo = maxima.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi.is_finite() && hi <= 2.0 * lo, "{maxima:?}");
}
