use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::field::flat_ratio_max;
use crate::calculus::{AxisBox, JetOracle};
use crate::error::{Error, Result};
use crate::jets::Smoothness;

/// Default cap on the number of Hölder pairs examined per box.
pub const DEFAULT_MAX_PAIRS: usize = 100_000;

/// Sampled lower estimates of the norms of a function on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    /// `max_{0≤m<s} sup |∇^mF|`.
    #[serde(with = "inf_float")]
    pub sup_derivs: f64,
    /// Hölder quotient of the top-order derivatives.
    #[serde(with = "inf_float")]
    pub holder: f64,
    /// Flatness seminorm.
    #[serde(with = "inf_float")]
    pub flat: f64,
    #[serde(with = "inf_float")]
    pub cs: f64,
    #[serde(with = "inf_float")]
    pub fs: f64,
    pub samples: usize,
    pub pairs: usize,
}

impl NormReport {
    fn from_parts(sup_derivs: f64, holder: f64, flat: f64, samples: usize, pairs: usize) -> Self {
        let cs = sup_derivs + holder;
        NormReport {
            sup_derivs,
            holder,
            flat,
            cs,
            fs: cs + flat,
            samples,
            pairs,
        }
    }
}

/// Serde helpers writing `+∞` as the string `"inf"`.
pub mod inf_float {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, serializer: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {t:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SampleOptions {
    /// Hölder pairs examined per box; beyond this, pairs are thinned per distance bin.
    pub max_pairs: usize,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            max_pairs: DEFAULT_MAX_PAIRS,
        }
    }
}

struct Sample {
    value: f64,
    order_norms: Vec<f64>,
    top: Vec<f64>,
}

fn grid_point(bx: &AxisBox, grid: usize, mut code: usize) -> Vec<f64> {
    let mut x = Vec::with_capacity(bx.dim());
    for j in 0..bx.dim() {
        let i = code % grid;
        code /= grid;
        let t = i as f64 / (grid - 1) as f64;
        x.push(bx.lo[j] + (bx.hi[j] - bx.lo[j]) * t);
    }
    x
}

fn sample_box(f: &dyn JetOracle, bx: &AxisBox, grid: usize, s: Smoothness) -> Result<Vec<Sample>> {
    let n = bx.dim();
    let total = grid.checked_pow(n as u32).ok_or_else(|| {
        Error::InvalidArgument(format!("grid {grid}^{n} is too large"))
    })?;
    let d = s.floor();
    (0..total)
        .into_par_iter()
        .map(|code| {
            let x = grid_point(bx, grid, code);
            let jet = f.jet(&x, d)?;
            let value = jet.value();
            if value < 0.0 {
                return Err(Error::NotNonnegative { point: x, value });
            }
            Ok(Sample {
                value,
                order_norms: jet.order_norms(),
                top: jet.order_coeffs(d),
            })
        })
        .collect()
}

/// Grid-neighbour pairs along lattice directions at dyadic offsets, thinned
/// deterministically within near/mid/far distance bins when over budget.
fn holder_pairs(n: usize, grid: usize, max_pairs: usize) -> Vec<(usize, usize)> {
    let mut dirs: Vec<Vec<i64>> = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let v: Vec<i64> = (0..n)
            .map(|_| {
                let d = (c % 3) as i64 - 1;
                c /= 3;
                d
            })
            .collect();
        if v.iter().find(|&&d| d != 0) == Some(&1) {
            dirs.push(v);
        }
    }
    let mut offsets = Vec::new();
    let mut k = 1usize;
    while k < grid {
        offsets.push(k);
        k *= 2;
    }
    let bin_of = |k: usize| match k {
        1 | 2 => 0,
        3..=8 => 1,
        _ => 2,
    };
    let count = |v: &[i64], k: usize| -> usize {
        v.iter()
            .map(|&d| if d == 0 { grid } else { grid.saturating_sub(k) })
            .product()
    };
    let mut bin_totals = [0usize; 3];
    for v in &dirs {
        for &k in &offsets {
            bin_totals[bin_of(k)] += count(v, k);
        }
    }
    let total: usize = bin_totals.iter().sum();
    let mut budgets = bin_totals;
    if total > max_pairs {
        // equal shares, with unused share passed on to later bins
        let mut left = max_pairs;
        let mut order: Vec<usize> = (0..3).collect();
        order.sort_by_key(|&b| bin_totals[b]);
        for (pos, &b) in order.iter().enumerate() {
            let share = left / (3 - pos);
            budgets[b] = bin_totals[b].min(share);
            left -= budgets[b];
        }
    }
    let strides: Vec<usize> = (0..3)
        .map(|b| {
            if budgets[b] == 0 {
                usize::MAX
            } else {
                bin_totals[b].div_ceil(budgets[b])
            }
        })
        .collect();
    let mut seen = [0usize; 3];
    let mut pairs = Vec::with_capacity(total.min(max_pairs));
    for v in &dirs {
        for &k in &offsets {
            let b = bin_of(k);
            for code in 0..grid.pow(n as u32) {
                let mut c = code;
                let mut partner = 0usize;
                let mut scale = 1usize;
                let mut ok = true;
                for &d in v.iter() {
                    let i = c % grid;
                    c /= grid;
                    let j = i as i64 + d * k as i64;
                    if j < 0 || j >= grid as i64 {
                        ok = false;
                        break;
                    }
                    partner += j as usize * scale;
                    scale *= grid;
                }
                if !ok {
                    continue;
                }
                if seen[b] % strides[b] == 0 {
                    pairs.push((code, partner));
                }
                seen[b] += 1;
            }
        }
    }
    pairs
}

fn holder_on_box(
    bx: &AxisBox,
    grid: usize,
    samples: &[Sample],
    s: Smoothness,
    max_pairs: usize,
) -> (f64, usize) {
    let pairs = holder_pairs(bx.dim(), grid, max_pairs);
    let sigma = s.sigma();
    let best = pairs
        .par_iter()
        .map(|&(i, j)| {
            let xi = grid_point(bx, grid, i);
            let xj = grid_point(bx, grid, j);
            let dist: f64 = xi
                .iter()
                .zip(&xj)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let diff: f64 = samples[i]
                .top
                .iter()
                .zip(&samples[j].top)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if diff == 0.0 {
                0.0
            } else {
                diff / dist.powf(sigma)
            }
        })
        .reduce(|| 0.0, f64::max);
    (best, pairs.len())
}

fn check_box(f: &dyn JetOracle, bx: &AxisBox, grid: usize) -> Result<()> {
    if grid < 2 {
        return Err(Error::InvalidArgument(format!("grid {grid} must be at least 2")));
    }
    if bx.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: bx.dim(),
        });
    }
    if !bx.is_bounded() {
        return Err(Error::InvalidArgument("sampling box must be bounded".into()));
    }
    if !f.domain().contains_box(bx) {
        return Err(Error::InvalidArgument(format!(
            "sampling box {:?}..{:?} leaves the oracle domain",
            bx.lo, bx.hi
        )));
    }
    Ok(())
}

/// Sampled norms of `F` on a uniform grid with `grid` points per axis.
///
/// All components are lower estimates of the true suprema.
pub fn sampled_norms(f: &dyn JetOracle, bx: &AxisBox, grid: usize, s: Smoothness) -> Result<NormReport> {
    sampled_norms_union(f, std::slice::from_ref(bx), grid, s, SampleOptions::default())
}

/// Sampled norms over a union of boxes, each with its own grid; Hölder pairs
/// are taken within each box.
pub fn sampled_norms_union(
    f: &dyn JetOracle,
    boxes: &[AxisBox],
    grid: usize,
    s: Smoothness,
    options: SampleOptions,
) -> Result<NormReport> {
    if boxes.is_empty() {
        return Err(Error::InvalidArgument("no sampling boxes".into()));
    }
    let (mut sup, mut holder, mut flat) = (0.0f64, 0.0f64, 0.0f64);
    let (mut count, mut pair_count) = (0usize, 0usize);
    for bx in boxes {
        check_box(f, bx, grid)?;
        let samples = sample_box(f, bx, grid, s)?;
        for smp in &samples {
            sup = smp.order_norms.iter().fold(sup, |a, &b| a.max(b));
            flat = flat.max(flat_ratio_max(smp.value, &smp.order_norms, s));
        }
        let (h, p) = holder_on_box(bx, grid, &samples, s, options.max_pairs);
        holder = holder.max(h);
        count += samples.len();
        pair_count += p;
    }
    Ok(NormReport::from_parts(sup, holder, flat, count, pair_count))
}

/// The sampled flat seminorm and the bound `(2^s/s) · Ċ^s` for `s ∈ (1, 2]`.
pub fn prop_c2_bound_check(
    f: &dyn JetOracle,
    bx: &AxisBox,
    grid: usize,
    s: Smoothness,
) -> Result<(f64, f64)> {
    if !(s.s() > 1.0 && s.s() <= 2.0) {
        return Err(Error::InvalidArgument(format!("s = {} not in (1, 2]", s.s())));
    }
    let report = sampled_norms(f, bx, grid, s)?;
    let factor = 2f64.powf(s.s()) / s.s();
    Ok((report.flat, factor * report.holder))
}
