//! Independent oracles and instance generators shared by the integration tests.
#![allow(dead_code)]

use flatjet::calculus::AxisBox;
use flatjet::jets::{enumerate_multiindices, Jet, Smoothness, WhitneyField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Finite-difference weights for the `m`-th derivative at `x0` from the
/// stencil `xs` (Fornberg's recursion).
pub fn fornberg_weights(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[m]).collect()
}

/// `∂^α F(x)` by tensor-product central differences with step `h`.
pub fn fd_derivative(f: &dyn Fn(&[f64]) -> f64, x: &[f64], alpha: &[u32], h: f64) -> f64 {
    let half = 3i32;
    let offsets: Vec<f64> = (-half..=half).map(|k| k as f64 * h).collect();
    let weights: Vec<Vec<f64>> = alpha
        .iter()
        .map(|&a| fornberg_weights(0.0, &offsets, a as usize))
        .collect();
    let n = x.len();
    let axes: Vec<usize> = (0..n).filter(|&k| alpha[k] > 0).collect();
    let mut total = 0.0;
    let mut idx = vec![0usize; axes.len()];
    loop {
        let mut y = x.to_vec();
        let mut w = 1.0;
        for (a, &k) in axes.iter().enumerate() {
            y[k] += offsets[idx[a]];
            w *= weights[k][idx[a]];
        }
        total += w * f(&y);
        let mut a = 0;
        while a < axes.len() {
            idx[a] += 1;
            if idx[a] < offsets.len() {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
        if a == axes.len() {
            break;
        }
    }
    total
}

/// A flat jet: random value in `[0.05, 1]` and derivatives inside `Γ(x, M)`.
pub fn random_flat_jet(rng: &mut ChaCha8Rng, x: &[f64], s: Smoothness, m_bound: f64) -> Jet {
    let n = x.len();
    let d = s.floor();
    let v: f64 = rng.gen_range(0.05..1.0);
    let counts: Vec<f64> = (0..=d)
        .map(|m| enumerate_multiindices(n, m).iter().filter(|a| a.order() == m).count() as f64)
        .collect();
    let coeffs: Vec<_> = enumerate_multiindices(n, d)
        .into_iter()
        .map(|a| {
            let m = a.order();
            if m == 0 {
                (a, v)
            } else {
                let cap = m_bound.min(m_bound.powf(m as f64 / s.s()) * v.powf((s.s() - m as f64) / s.s()));
                let w = 0.9 * cap / counts[m].sqrt();
                (a, rng.gen_range(-w..=w))
            }
        })
        .collect();
    Jet::new(x.to_vec(), d, coeffs).unwrap()
}

/// A random flat Whitney field on `count` distinct points in `[0, 1]^n`; a
/// few points get the zero jet.
pub fn random_field(rng: &mut ChaCha8Rng, n: usize, count: usize, s: Smoothness) -> WhitneyField {
    let mut jets: Vec<Jet> = Vec::new();
    while jets.len() < count {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        if jets.iter().any(|j| {
            j.basepoint().iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) < 1e-3
        }) {
            continue;
        }
        let jet = if rng.gen_bool(0.2) {
            Jet::zero(x.clone(), s.floor())
        } else {
            random_flat_jet(rng, &x, s, 1.0)
        };
        jets.push(jet);
    }
    WhitneyField::new(jets).unwrap()
}

pub fn unit_box(n: usize) -> AxisBox {
    AxisBox::cube(n, -0.5, 1.5)
}

/// Max-form Whitney-field norm for `n = 1`, `s = 2`, written out by hand:
/// jets are `f_i + b_i (x − x_i)`.
pub fn field_norm_1d_s2(xs: &[f64], fs: &[f64], bs: &[f64]) -> f64 {
    let mut norm = 0.0f64;
    for i in 0..xs.len() {
        norm = norm.max(fs[i]).max(bs[i].abs());
        if bs[i] != 0.0 {
            norm = norm.max(if fs[i] == 0.0 { f64::INFINITY } else { bs[i] * bs[i] / fs[i] });
        }
        for j in 0..xs.len() {
            if i != j {
                let h = xs[j] - xs[i];
                norm = norm.max((fs[i] + bs[i] * h - fs[j]).abs() / (h * h));
                norm = norm.max((bs[i] - bs[j]).abs() / h.abs());
            }
        }
    }
    norm
}

/// Minimum of [`field_norm_1d_s2`] over the slopes by a zooming grid search.
/// The objective is convex in the slopes, so zooming around the grid minimum
/// converges to the global minimum.
pub fn brute_force_surrogate_1d_s2(xs: &[f64], fs: &[f64]) -> f64 {
    let free: Vec<usize> = (0..xs.len()).filter(|&i| fs[i] > 0.0).collect();
    let zero = vec![0.0; xs.len()];
    let start = field_norm_1d_s2(xs, fs, &zero);
    if free.is_empty() {
        return start;
    }
    let per_axis = 41usize;
    let mut center = vec![0.0; free.len()];
    let mut half = start;
    let mut best = start;
    for _ in 0..40 {
        let mut idx = vec![0usize; free.len()];
        let mut best_at = center.clone();
        loop {
            let mut bs = zero.clone();
            let mut at = Vec::with_capacity(free.len());
            for (a, &i) in free.iter().enumerate() {
                let v = center[a] - half + 2.0 * half * idx[a] as f64 / (per_axis - 1) as f64;
                bs[i] = v;
                at.push(v);
            }
            let v = field_norm_1d_s2(xs, fs, &bs);
            if v < best {
                best = v;
                best_at = at;
            }
            let mut a = 0;
            while a < idx.len() {
                idx[a] += 1;
                if idx[a] < per_axis {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
            if a == idx.len() {
                break;
            }
        }
        center = best_at;
        half *= 0.25;
    }
    best
}
