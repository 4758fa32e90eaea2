//! The model bump `g(t) = exp(1 − 1/(1 − t²))` on `(−1, 1)`, its tensor
//! product `φ₀`, and a flat-top cutoff built from shifted copies of `g`.

use std::sync::OnceLock;

use crate::jets::basis::basis;

/// Highest derivative order for which the bump numerators are tabulated.
pub const MAX_BUMP_ORDER: usize = 12;

/// Below this clearance from `±1` the bump and all its derivatives are reported as 0.
const EDGE: f64 = 1e-12;

/// Exact numerators of the bump derivatives.
///
/// With `u = 1 − t²`, `g^{(m)}(t) = p_m(t) · u^{−2m} · g(t)` where
/// `p₀ = 1` and `p_{m+1} = p_m′·u² + 4m·t·u·p_m − 2t·p_m`.
#[derive(Debug)]
pub struct BumpRational {
    numerators: Vec<Vec<i128>>,
}

impl BumpRational {
    fn build(max_order: usize) -> BumpRational {
        let mut numerators = vec![vec![1i128]];
        for m in 0..max_order {
            let p = &numerators[m];
            let u = [1i128, 0, -1];
            let u2 = poly_mul(&u, &u);
            let dp = poly_derivative(p);
            let mut next = poly_mul(&dp, &u2);
            let tu = poly_mul(&[0, 4 * m as i128], &u);
            next = poly_add(&next, &poly_mul(&tu, p));
            next = poly_add(&next, &poly_mul(&[0, -2], p));
            trim(&mut next);
            numerators.push(next);
        }
        BumpRational { numerators }
    }

    /// Shared table, built on first use.
    pub fn get() -> &'static BumpRational {
        static TABLE: OnceLock<BumpRational> = OnceLock::new();
        TABLE.get_or_init(|| BumpRational::build(MAX_BUMP_ORDER))
    }

    /// Coefficients of `p_m` in increasing powers of `t`.
    pub fn numerator(&self, m: usize) -> &[i128] {
        &self.numerators[m]
    }

    pub fn max_order(&self) -> usize {
        self.numerators.len() - 1
    }
}

fn poly_mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut out = vec![0i128; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut out = vec![0i128; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    out
}

fn poly_derivative(a: &[i128]) -> Vec<i128> {
    if a.len() <= 1 {
        return vec![0];
    }
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * i as i128)
        .collect()
}

fn trim(a: &mut Vec<i128>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn horner(coeffs: &[i128], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c as f64)
}

/// `g^{(order)}(t)`; exactly 0 for `|t| ≥ 1`.
///
/// Panics if `order > MAX_BUMP_ORDER`.
pub fn bump_g(t: f64, order: usize) -> f64 {
    assert!(order <= MAX_BUMP_ORDER, "bump derivative order {order} not tabulated");
    if !(t.abs() < 1.0 - EDGE) {
        return 0.0;
    }
    let u = (1.0 - t) * (1.0 + t);
    let exponent = 1.0 - 1.0 / u;
    if exponent < -700.0 {
        return 0.0;
    }
    if order == 0 {
        return exponent.exp();
    }
    let p = horner(BumpRational::get().numerator(order), t);
    p * (exponent - 2.0 * order as f64 * u.ln()).exp()
}

/// `g(t), g′(t), …, g^{(order)}(t)`.
pub fn bump_derivatives(t: f64, order: usize) -> Vec<f64> {
    (0..=order).map(|k| bump_g(t, k)).collect()
}

/// `∂^αφ₀(x) = Π_j g^{(α_j)}(x_j)`.
pub fn phi0(x: &[f64], alpha: &[u32]) -> f64 {
    x.iter()
        .zip(alpha)
        .map(|(&t, &a)| bump_g(t, a as usize))
        .product()
}

/// Derivatives `χ₁^{(k)}(t)`, `k ≤ order`, of the flat-top cutoff
/// `χ₁(t) = g(t) / (g(t−1) + g(t) + g(t+1))`.
///
/// `χ₁` is supported in `[−1, 1]`, takes values in `[0, 1]` and equals 1 to
/// infinite order at `t = 0`, because the shifted bumps `g(t ± 1)` are
/// infinitely flat there.
pub fn cutoff_derivatives(t: f64, order: usize) -> Vec<f64> {
    if !(t.abs() < 1.0 - EDGE) {
        return vec![0.0; order + 1];
    }
    let b = basis(1, order);
    // χ₁ = g/(g + r) with r = g(t−1) + g(t+1); exactly 1 where r vanishes.
    // Forming 1 − r/(g + r) instead would cancel to 0 while the derivatives
    // stay nonzero.
    let rest: Vec<f64> = (0..=order)
        .map(|k| bump_g(t - 1.0, k) + bump_g(t + 1.0, k))
        .collect();
    if rest.iter().all(|&r| r == 0.0) {
        let mut out = vec![0.0; order + 1];
        out[0] = 1.0;
        return out;
    }
    let g: Vec<f64> = (0..=order).map(|k| bump_g(t, k)).collect();
    let den: Vec<f64> = rest.iter().zip(&g).map(|(r, g)| r + g).collect();
    let out = b.mul(&g, &b.recip(&den));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_numerators() {
        let table = BumpRational::get();
        assert_eq!(table.numerator(0), &[1]);
        assert_eq!(table.numerator(1), &[0, -2]);
        assert_eq!(table.numerator(2), &[-2, 0, 0, 0, 6]);
    }

    #[test]
    fn values() {
        assert_eq!(bump_g(0.0, 0), 1.0);
        assert_eq!(bump_g(1.0, 0), 0.0);
        assert_eq!(bump_g(1.0, 1), 0.0);
        assert_eq!(bump_g(-1.5, 3), 0.0);
        assert!((bump_g(0.5, 0) - (-1.0f64 / 3.0).exp()).abs() < 1e-15);
        assert!((bump_g(0.5, 0) - 0.7165313).abs() < 1e-7);
        assert_eq!(bump_g(0.0, 1), 0.0);
        assert!((bump_g(0.0, 2) + 2.0).abs() < 1e-14);
    }

    #[test]
    fn derivatives_match_central_differences() {
        for m in 1..=4 {
            for i in 0..50 {
                let t = -0.95 + 1.9 * (i as f64 + 0.5) / 50.0;
                let h = 1e-5;
                let fd = (bump_g(t + h, m - 1) - bump_g(t - h, m - 1)) / (2.0 * h);
                let exact = bump_g(t, m);
                let scale = exact.abs().max(1e-3);
                assert!(
                    (fd - exact).abs() <= 1e-6 * scale.max(exact.abs()) + 1e-6 * scale,
                    "m={m} t={t} fd={fd} exact={exact}"
                );
            }
        }
    }

    #[test]
    fn phi0_examples() {
        assert_eq!(phi0(&[0.0, 0.0], &[0, 0]), 1.0);
        assert_eq!(phi0(&[1.2, 0.0], &[0, 0]), 0.0);
        assert_eq!(phi0(&[0.3, -1.0], &[1, 2]), 0.0);
        assert_eq!(phi0(&[0.5, 0.0], &[1, 0]), bump_g(0.5, 1));
    }

    #[test]
    fn cutoff_is_flat_top() {
        let at0 = cutoff_derivatives(0.0, 6);
        assert_eq!(at0[0], 1.0);
        for d in &at0[1..] {
            assert_eq!(*d, 0.0);
        }
        for i in 0..=200 {
            let t = -1.2 + 2.4 * i as f64 / 200.0;
            let v = cutoff_derivatives(t, 0)[0];
            assert!((0.0..=1.0).contains(&v), "t={t} v={v}");
            if t.abs() >= 1.0 {
                assert_eq!(v, 0.0);
            }
        }
    }
}
