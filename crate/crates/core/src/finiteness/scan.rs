use rayon::prelude::*;
use serde::Serialize;

use super::shape::ShapeFieldSpec;
use super::surrogate::{surrogate_local_norm, SurrogateOptions, SurrogateResult};
use crate::error::{Error, Result};
use crate::jets::monomial_count;
use crate::norms::whitney_field_norm_parts;

/// Largest point set the scan enumerates subsets of.
pub const MAX_SCAN_POINTS: usize = 14;

/// `2^{dim 𝒫}` with `dim 𝒫 = C(n + ⌊s⌋, n)`, saturating.
pub fn k_sharp(n: usize, floor: usize) -> usize {
    let dim = monomial_count(n, floor);
    if dim >= usize::BITS as usize {
        usize::MAX
    } else {
        1usize << dim
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ScanOptions {
    /// Subset-size cap; defaults to [`k_sharp`].
    pub k: Option<usize>,
    /// Flag a violation when `global > c_cap · local_max`.
    pub c_cap: Option<f64>,
    pub surrogate: SurrogateOptions,
}

#[derive(Clone, Debug, Serialize)]
pub struct FinitenessReport {
    pub n: usize,
    pub s: f64,
    pub k: usize,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub subsets_evaluated: usize,
    pub local_max: f64,
    pub global: f64,
    /// `global / local_max`, or 1 when both vanish.
    pub ratio: f64,
    /// Positions in `points` of a subset attaining `local_max`.
    pub worst_subset: Vec<usize>,
    pub c_cap: Option<f64>,
    pub violation: bool,
}

fn subsets_up_to(len: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(start: usize, len: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        for i in start..len {
            current.push(i);
            out.push(current.clone());
            if current.len() < k {
                rec(i + 1, len, k, current, out);
            }
            current.pop();
        }
    }
    if k > 0 {
        rec(0, len, k, &mut current, &mut out);
    }
    out
}

/// Surrogate norms of `f` on `E` and on every subset of size at most `k`.
///
/// Each subset solve is warm-started from the global minimiser restricted to
/// the subset, so `local_max ≤ global` holds exactly.
pub fn finiteness_scan(spec: &ShapeFieldSpec, options: ScanOptions) -> Result<FinitenessReport> {
    if spec.len() > MAX_SCAN_POINTS {
        return Err(Error::TooManyPoints {
            count: spec.len(),
            max: MAX_SCAN_POINTS,
        });
    }
    let s = spec.smoothness();
    let k = options.k.unwrap_or_else(|| k_sharp(spec.dim(), s.floor()));
    if k == 0 {
        return Err(Error::InvalidArgument("subset cap k must be at least 1".into()));
    }
    if let Some(c) = options.c_cap {
        if !(c > 0.0) {
            return Err(Error::InvalidArgument(format!("c_cap = {c} must be positive")));
        }
    }
    let global = surrogate_local_norm(spec.points(), spec.values(), s, None, options.surrogate)?;
    let all: Vec<usize> = (0..spec.len()).collect();
    let subsets: Vec<Vec<usize>> = subsets_up_to(spec.len(), k.min(spec.len()))
        .into_iter()
        .filter(|sub| sub.len() < spec.len())
        .collect();
    let locals = subsets
        .par_iter()
        .map(|sub| local_norm(spec, sub, &global, options.surrogate))
        .collect::<Result<Vec<f64>>>()?;
    let mut local_max = f64::NEG_INFINITY;
    let mut worst_subset = Vec::new();
    for (sub, &v) in subsets.iter().zip(&locals) {
        if v > local_max {
            local_max = v;
            worst_subset = sub.clone();
        }
    }
    let mut subsets_evaluated = subsets.len();
    if k >= spec.len() {
        subsets_evaluated += 1;
        if global.value >= local_max {
            local_max = global.value;
            worst_subset = all;
        }
    }
    let ratio = if global.value == 0.0 && local_max == 0.0 {
        1.0
    } else {
        global.value / local_max
    };
    let violation = options.c_cap.is_some_and(|c| global.value > c * local_max);
    Ok(FinitenessReport {
        n: spec.dim(),
        s: s.s(),
        k,
        points: spec.points().to_vec(),
        values: spec.values().to_vec(),
        subsets_evaluated,
        local_max,
        global: global.value,
        ratio,
        worst_subset,
        c_cap: options.c_cap,
        violation,
    })
}

fn local_norm(
    spec: &ShapeFieldSpec,
    subset: &[usize],
    global: &SurrogateResult,
    options: SurrogateOptions,
) -> Result<f64> {
    let s = spec.smoothness();
    let sub = spec.restrict(subset);
    let start = global.field.restrict(subset);
    let start_norm = whitney_field_norm_parts(&start, s)?.max_form();
    let found = surrogate_local_norm(sub.points(), sub.values(), s, Some(&start), options)?;
    Ok(found.value.min(start_norm))
}
