use serde::{Deserialize, Serialize};

use super::field::flat_ratio_max;
use crate::error::{Error, Result};
use crate::jets::{monomial_count, Jet, Smoothness};

/// The bound `M` of the jet class `Γ(x₀, M)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaSpec {
    pub x0: Vec<f64>,
    pub m: f64,
}

impl GammaSpec {
    pub fn new(x0: Vec<f64>, m: f64) -> Result<GammaSpec> {
        if !(m >= 0.0) {
            return Err(Error::InvalidArgument(format!("Γ bound {m} must be nonnegative")));
        }
        Ok(GammaSpec { x0, m })
    }
}

fn at_degree(jet: &Jet, s: Smoothness) -> Result<Vec<f64>> {
    if jet.degree() < s.floor() {
        return Err(Error::OrderExceeded {
            order: s.floor(),
            degree: jet.degree(),
        });
    }
    let mut norms = jet.order_norms();
    norms.truncate(s.floor() + 1);
    Ok(norms)
}

/// Largest flat ratio of `P` at its basepoint over `1 ≤ m < s`.
pub fn jet_flat_ratio(jet: &Jet, s: Smoothness) -> Result<f64> {
    let v = jet.value();
    if v < 0.0 {
        return Err(Error::NotNonnegative {
            point: jet.basepoint().to_vec(),
            value: v,
        });
    }
    Ok(flat_ratio_max(v, &at_degree(jet, s)?, s))
}

/// The smallest `M` with `P ∈ Γ(x₀, M)`: the larger of `max_m |∇^mP(x₀)|`
/// and the flat ratio. Infinite when `P` is not flat at a zero.
pub fn gamma_bound(jet: &Jet, s: Smoothness) -> Result<f64> {
    let sup = at_degree(jet, s)?.into_iter().fold(0.0, f64::max);
    Ok(sup.max(jet_flat_ratio(jet, s)?))
}

/// Whether `P ∈ Γ(x₀, M)`. A jet based elsewhere is first re-expanded at `x₀`.
pub fn gamma_member(jet: &Jet, spec: &GammaSpec, s: Smoothness) -> bool {
    let local;
    let jet = if jet.basepoint() == spec.x0.as_slice() {
        jet
    } else {
        local = jet.recenter(&spec.x0);
        &local
    };
    match gamma_bound(jet, s) {
        Ok(b) => b <= spec.m,
        Err(_) => false,
    }
}

/// The constant `c₀` of the flat lengthscale: the largest `c ≤ 1` with
/// `C(n+⌊s⌋, n) · Σ_{1≤k≤⌊s⌋} n^{k/2} c^k / k! ≤ ε`.
///
/// With this choice every `x` with `|x − x₀| < c₀ (P(x₀)/M)^{1/s}` satisfies
/// `|∇^mP(x) − ∇^mP(x₀)| ≤ ε M^{m/s} P(x₀)^{(s−m)/s}` for `0 ≤ m < s`.
pub fn lengthscale_constant(n: usize, s: Smoothness, eps: f64) -> f64 {
    let d = s.floor();
    let comb = monomial_count(n, d) as f64;
    let lhs = |c: f64| {
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..=d {
            term *= (n as f64).sqrt() * c / k as f64;
            sum += term;
        }
        comb * sum
    };
    if lhs(1.0) <= eps {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if lhs(mid) <= eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// The radius `δ = c₀ (P(x₀)/M)^{1/s}` within which `P` stays within
/// `ε P(x₀)` of its value, where `M` is the flat ratio of `P`.
///
/// Returns `+∞` when `M = 0 < P(x₀)` and `0` when `P(x₀) = 0`.
pub fn flat_lengthscale(jet: &Jet, s: Smoothness, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("ε = {eps} must be positive")));
    }
    let m = jet_flat_ratio(jet, s)?;
    let v = jet.value();
    if v == 0.0 {
        return Ok(0.0);
    }
    if m == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(lengthscale_constant(jet.dim(), s, eps) * (v / m).powf(1.0 / s.s()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2() -> Smoothness {
        Smoothness::new(2.0).unwrap()
    }

    #[test]
    fn membership_examples() {
        let z = Jet::zero(vec![0.0], 1);
        assert!(gamma_member(&z, &GammaSpec::new(vec![0.0], 0.0).unwrap(), s2()));
        let p = Jet::from_slices(&[0.0], 1, &[(&[0], 1.0), (&[1], 1.0)]).unwrap();
        assert!(gamma_member(&p, &GammaSpec::new(vec![0.0], 1.0).unwrap(), s2()));
        assert!(!gamma_member(&p, &GammaSpec::new(vec![0.0], 0.5).unwrap(), s2()));
        let q = Jet::from_slices(&[0.0], 1, &[(&[1], 1.0)]).unwrap();
        assert!(!gamma_member(&q, &GammaSpec::new(vec![0.0], 1e300).unwrap(), s2()));
        assert!(GammaSpec::new(vec![0.0], -1.0).is_err());
    }

    #[test]
    fn lengthscale_examples() {
        let c = Jet::constant(vec![0.0], 1, 3.0);
        assert_eq!(flat_lengthscale(&c, s2(), 0.5).unwrap(), f64::INFINITY);
        assert_eq!(flat_lengthscale(&Jet::zero(vec![0.0], 1), s2(), 0.5).unwrap(), 0.0);
        let p = Jet::from_slices(&[0.0], 1, &[(&[0], 1.0), (&[1], 1.0)]).unwrap();
        let c0 = lengthscale_constant(1, s2(), 0.5);
        assert_eq!(flat_lengthscale(&p, s2(), 0.5).unwrap(), c0);
        // n = 1, ⌊s⌋ = 1: 2·c ≤ ½
        assert!((c0 - 0.25).abs() < 1e-12);
        let delta = c0;
        for i in 0..1000 {
            let x = -delta + 2.0 * delta * (i as f64 + 0.5) / 1000.0;
            assert!((p.eval(&[x]) - 1.0).abs() <= 0.5);
        }
        let neg = Jet::constant(vec![0.0], 1, -1.0);
        assert!(flat_lengthscale(&neg, s2(), 0.5).is_err());
    }
}
