//! Dense jet algebra over a fixed `(n, d)`.
//!
//! Coefficients are stored in derivative form (`∂^αP(x₀)`) in graded-lex
//! order. All combinatorial factors are exact integers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::multiindex::{enumerate_multiindices, MultiIndex};

pub(crate) struct Basis {
    pub n: usize,
    pub d: usize,
    pub indices: Vec<MultiIndex>,
    pub orders: Vec<usize>,
    lookup: HashMap<MultiIndex, usize>,
    /// For each target γ: the terms `(α, β, binom(γ, α))` with `α + β = γ`.
    products: Vec<Vec<(usize, usize, f64)>>,
    /// For each α: the pairs `(β, β − α)` with `β ≥ α`.
    shifts: Vec<Vec<(usize, usize)>>,
    inv_factorials: Vec<f64>,
}

impl Basis {
    fn build(n: usize, d: usize) -> Basis {
        let indices = enumerate_multiindices(n, d);
        let orders: Vec<usize> = indices.iter().map(|a| a.order()).collect();
        let lookup: HashMap<MultiIndex, usize> = indices
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let len = indices.len();
        let mut products = vec![Vec::new(); len];
        let mut shifts = vec![Vec::new(); len];
        for (i, a) in indices.iter().enumerate() {
            for (j, b) in indices.iter().enumerate() {
                if orders[i] + orders[j] <= d {
                    let g = a.add(b);
                    let k = lookup[&g];
                    products[k].push((i, j, g.binomial(a) as f64));
                }
                if let Some(diff) = b.checked_sub(a) {
                    shifts[i].push((j, lookup[&diff]));
                }
            }
        }
        let inv_factorials = indices.iter().map(|a| 1.0 / a.factorial() as f64).collect();
        Basis {
            n,
            d,
            indices,
            orders,
            lookup,
            products,
            shifts,
            inv_factorials,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn index_of(&self, alpha: &MultiIndex) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }

    /// Truncated product in derivative form (Leibniz rule).
    pub fn mul(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        self.products
            .iter()
            .map(|terms| terms.iter().map(|&(i, j, c)| c * a[i] * b[j]).sum())
            .collect()
    }

    pub fn mul_add_into(&self, out: &mut [f64], a: &[f64], b: &[f64]) {
        for (o, terms) in out.iter_mut().zip(&self.products) {
            *o += terms.iter().map(|&(i, j, c)| c * a[i] * b[j]).sum::<f64>();
        }
    }

    /// Truncated reciprocal; requires `a[0] != 0`.
    pub fn recip(&self, a: &[f64]) -> Vec<f64> {
        let mut b = vec![0.0; self.len()];
        let inv = 1.0 / a[0];
        b[0] = inv;
        for k in 1..self.len() {
            let mut acc = 0.0;
            for &(i, j, c) in &self.products[k] {
                if i != 0 {
                    acc += c * a[i] * b[j];
                }
            }
            b[k] = -inv * acc;
        }
        b
    }

    /// Re-expands a jet at `x₀` as a jet at `x₀ + h`.
    pub fn shift(&self, a: &[f64], h: &[f64]) -> Vec<f64> {
        let powers: Vec<f64> = self
            .indices
            .iter()
            .zip(&self.inv_factorials)
            .map(|(g, f)| g.monomial(h) * f)
            .collect();
        self.shifts
            .iter()
            .map(|terms| terms.iter().map(|&(j, g)| a[j] * powers[g]).sum())
            .collect()
    }
}

type Cache = Mutex<HashMap<(usize, usize), Arc<Basis>>>;

pub(crate) fn basis(n: usize, d: usize) -> Arc<Basis> {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry((n, d))
        .or_insert_with(|| Arc::new(Basis::build(n, d)))
        .clone()
}
