//! Multivariate Faà di Bruno formula and fractional powers of jets.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::oracle::{falling, JetOracle};
use super::partitions::enumerate_partitions;
use crate::error::{Error, Result};
use crate::jets::basis::{basis, Basis};
use crate::jets::{Jet, MultiIndex};

/// Values below this are treated as zero by [`power_jet`].
pub const POWER_ZERO: f64 = 1e-300;

/// One term of the formula: `multiplicity · h^{(|π|)} · Π ∂^βF`.
struct Term {
    multiplicity: f64,
    parts: Vec<usize>,
}

type Plan = Vec<Vec<Term>>;

fn plan(n: usize, d: usize) -> Arc<Plan> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Plan>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry((n, d))
        .or_insert_with(|| {
            let b = basis(n, d);
            let plan = b
                .indices
                .iter()
                .map(|alpha| {
                    enumerate_partitions(alpha)
                        .partitions
                        .into_iter()
                        .map(|p| Term {
                            multiplicity: p.multiplicity as f64,
                            parts: p.parts.iter().map(|beta| b.index_of(beta).unwrap()).collect(),
                        })
                        .collect()
                })
                .collect();
            Arc::new(plan)
        })
        .clone()
}

fn evaluate_term_sum(terms: &[Term], dense: &[f64], hd: &[f64]) -> f64 {
    terms
        .iter()
        .map(|t| {
            t.multiplicity * hd[t.parts.len()] * t.parts.iter().map(|&i| dense[i]).product::<f64>()
        })
        .sum()
}

/// `∂^α(h∘F)(x)`, where `h_derivs(k, t)` returns `h^{(k)}(t)`.
///
/// Each multiset partition of `α` enters with its multiplicity, the number
/// of set partitions of the derivative slots it represents.
pub fn faa_di_bruno(
    f: &dyn JetOracle,
    h_derivs: &dyn Fn(usize, f64) -> f64,
    x: &[f64],
    alpha: &MultiIndex,
) -> Result<f64> {
    let jet = f.jet(x, alpha.order())?;
    if jet.degree() < alpha.order() {
        return Err(Error::OrderExceeded {
            order: alpha.order(),
            degree: jet.degree(),
        });
    }
    let t = jet.value();
    if alpha.is_zero() {
        return Ok(h_derivs(0, t));
    }
    let b = jet.basis();
    let dense = jet.to_dense(&b);
    let hd: Vec<f64> = (0..=alpha.order()).map(|k| h_derivs(k, t)).collect();
    let k = b.index_of(alpha).ok_or(Error::DimensionMismatch {
        expected: jet.dim(),
        found: alpha.dim(),
    })?;
    Ok(evaluate_term_sum(&plan(b.n, b.d)[k], &dense, &hd))
}

/// The jet of `h∘P` at the basepoint of `P`.
pub fn compose_jet(jet: &Jet, h_derivs: &dyn Fn(usize, f64) -> f64) -> Jet {
    let b = jet.basis();
    let dense = compose_dense(&b, &jet.to_dense(&b), h_derivs);
    Jet::from_dense(&b, jet.basepoint().to_vec(), &dense)
}

pub(crate) fn compose_dense(b: &Basis, dense: &[f64], h_derivs: &dyn Fn(usize, f64) -> f64) -> Vec<f64> {
    let t = dense[0];
    let hd: Vec<f64> = (0..=b.d).map(|k| h_derivs(k, t)).collect();
    let plan = plan(b.n, b.d);
    plan.iter()
        .enumerate()
        .map(|(k, terms)| {
            if k == 0 {
                hd[0]
            } else {
                evaluate_term_sum(terms, dense, &hd)
            }
        })
        .collect()
}

/// The jet of `F^r` given the jet of `F`, for `r ∈ (0, 1]`.
///
/// A zero jet maps to the zero jet. A jet whose value is (numerically) zero
/// but with some nonzero derivative has no power jet.
pub fn power_jet(jet: &Jet, r: f64) -> Result<Jet> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidArgument(format!("exponent r = {r} not in (0, 1]")));
    }
    let v = jet.value();
    if v < 0.0 {
        return Err(Error::NotNonnegative {
            point: jet.basepoint().to_vec(),
            value: v,
        });
    }
    if v < POWER_ZERO {
        if jet.coeffs().keys().all(|a| a.is_zero()) {
            return Ok(Jet::zero(jet.basepoint().to_vec(), jet.degree()));
        }
        return Err(Error::PowerJetUndefined);
    }
    if r == 1.0 {
        return Ok(jet.clone());
    }
    Ok(compose_jet(jet, &|k, t| falling(r, k) * t.powf(r - k as f64)))
}
