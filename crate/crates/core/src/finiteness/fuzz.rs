use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::shape::{gamma_f_member, ShapeFieldSpec, VALUE_TOL};
use crate::calculus::power_jet;
use crate::error::{Error, Result};
use crate::jets::{enumerate_multiindices, multiindices_of_order, Jet, Smoothness};
use crate::norms::gamma_bound;

/// Rejections tolerated before the generator gives up.
pub const MAX_REJECTIONS: usize = 100_000;

/// One instance of the Whitney-convexity hypotheses and the blended jet.
#[derive(Clone, Debug, Serialize)]
pub struct ConvexityWitness {
    pub x0: Vec<f64>,
    pub f: f64,
    /// Smallest `M` for which every hypothesis holds.
    pub m: f64,
    pub delta: f64,
    pub p1: Jet,
    pub p2: Jet,
    pub q1: Jet,
    pub q2: Jet,
    /// `𝒥(Q₁²P₁ + Q₂²P₂)`.
    pub p: Jet,
    /// `Γ bound of P / M`, the smallest `C` with `P ∈ Γ_f(x₀, C·M)`.
    pub measured_c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FuzzSummary {
    pub trials: usize,
    pub max_measured_c: f64,
    pub mean_measured_c: f64,
}

pub fn summarize(witnesses: &[ConvexityWitness]) -> FuzzSummary {
    let max = witnesses.iter().map(|w| w.measured_c).fold(0.0, f64::max);
    let mean = if witnesses.is_empty() {
        0.0
    } else {
        witnesses.iter().map(|w| w.measured_c).sum::<f64>() / witnesses.len() as f64
    };
    FuzzSummary {
        trials: witnesses.len(),
        max_measured_c: max,
        mean_measured_c: mean,
    }
}

fn order_bounds_hold(jet: &Jet, bound: impl Fn(usize) -> f64) -> bool {
    jet.order_norms()
        .iter()
        .enumerate()
        .all(|(m, &a)| a <= bound(m))
}

/// `max_m |∇^m(P₁ − P₂)(x₀)| / δ^{s−m}`.
fn pair_ratio(p1: &Jet, p2: &Jet, delta: f64, s: Smoothness) -> Result<f64> {
    Ok(p1
        .sub(p2)?
        .order_norms()
        .iter()
        .enumerate()
        .map(|(m, a)| a / delta.powf(s.s() - m as f64))
        .fold(0.0, f64::max))
}

/// Builds the witness for given `P₁, P₂, Q₂` at `x₀`, deriving `Q₁` from
/// `𝒥(Q₁² + Q₂²) = 1` and `M` as the least bound satisfying the hypotheses.
pub fn combine_witness(
    f: f64,
    delta: f64,
    p1: Jet,
    p2: Jet,
    q2: Jet,
    s: Smoothness,
) -> Result<ConvexityWitness> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidArgument(format!("δ = {delta} not in (0, 1]")));
    }
    let one = Jet::constant(p1.basepoint().to_vec(), p1.degree(), 1.0);
    let q1 = power_jet(&one.sub(&q2.multiply(&q2)?)?, 0.5)?;
    let m = gamma_bound(&p1, s)?
        .max(gamma_bound(&p2, s)?)
        .max(pair_ratio(&p1, &p2, delta, s)?);
    let p = q1
        .multiply(&q1)?
        .multiply(&p1)?
        .add(&q2.multiply(&q2)?.multiply(&p2)?)?;
    let gp = gamma_bound(&p, s)?;
    let measured_c = if gp == 0.0 { 0.0 } else { gp / m };
    Ok(ConvexityWitness {
        x0: p1.basepoint().to_vec(),
        f,
        m,
        delta,
        p1,
        p2,
        q1,
        q2,
        p,
        measured_c,
    })
}

/// Re-checks every hypothesis of a witness from its jets.
pub fn verify_witness(w: &ConvexityWitness, s: Smoothness) -> std::result::Result<(), String> {
    let fail = |what: &str| Err(format!("witness at {:?}: {what}", w.x0));
    let member = |p: &Jet| gamma_f_member(p, &w.x0, w.m, w.f, s).map_err(|e| e.to_string());
    if !member(&w.p1)? {
        return fail("P1 not in Γ_f(x0, M)");
    }
    if !member(&w.p2)? {
        return fail("P2 not in Γ_f(x0, M)");
    }
    let diff = w.p1.sub(&w.p2).map_err(|e| e.to_string())?;
    for (m, a) in diff.order_norms().iter().enumerate() {
        if a / w.delta.powf(s.s() - m as f64) > w.m {
            return fail("P1 − P2 exceeds M δ^(s−m)");
        }
    }
    for (name, q) in [("Q1", &w.q1), ("Q2", &w.q2)] {
        if !order_bounds_hold(q, |m| w.delta.powi(-(m as i32))) {
            return fail(&format!("{name} exceeds δ^(−m)"));
        }
    }
    let sum = w
        .q1
        .multiply(&w.q1)
        .and_then(|a| a.add(&w.q2.multiply(&w.q2)?))
        .map_err(|e| e.to_string())?;
    let one = Jet::constant(w.x0.clone(), sum.degree(), 1.0);
    if sum.max_coeff_diff(&one).map_err(|e| e.to_string())? > 1e-12 {
        return fail("Q1² + Q2² is not 1");
    }
    if (w.p.value() - w.f).abs() > VALUE_TOL * w.f.max(1.0) {
        return fail("blended value differs from f(x0)");
    }
    Ok(())
}

fn random_jet(
    rng: &mut ChaCha8Rng,
    x0: &[f64],
    d: usize,
    value: Option<f64>,
    half_width: impl Fn(usize) -> f64,
) -> Result<Jet> {
    let n = x0.len();
    let coeffs = enumerate_multiindices(n, d).into_iter().filter_map(|a| {
        let m = a.order();
        if m == 0 {
            if let Some(v) = value {
                return Some((a, v));
            }
        }
        let w = half_width(m);
        if w > 0.0 {
            Some((a, rng.gen_range(-w..=w)))
        } else {
            None
        }
    });
    Jet::new(x0.to_vec(), d, coeffs.collect::<Vec<_>>())
}

/// Random witnesses of the Whitney-convexity hypotheses at the points of `spec`.
///
/// `δ` is uniform in `(0, 1]`, `Q₂` has order-`m` coefficients uniform in
/// `[−δ^{−m}/2, δ^{−m}/2]`, and draws violating `|∇^mQ_j| ≤ δ^{−m}` are
/// rejected.
pub fn fuzz_whitney_convexity(
    spec: &ShapeFieldSpec,
    trials: usize,
    seed: u64,
) -> Result<Vec<ConvexityWitness>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let s = spec.smoothness();
    let d = s.floor();
    let n = spec.dim();
    let counts: Vec<f64> = (0..=d)
        .map(|m| multiindices_of_order(n, m).len() as f64)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    let mut rejections = 0usize;
    for t in 0..trials {
        let i = t % spec.len();
        let x0 = &spec.points()[i];
        let f = spec.values()[i];
        let witness = loop {
            let delta = 1.0 - rng.gen::<f64>();
            let scale = f * 10f64.powf(rng.gen_range(0.0..2.0));
            let a = |m: usize| {
                if f == 0.0 {
                    0.0
                } else {
                    scale.min(scale.powf(m as f64 / s.s()) * f.powf((s.s() - m as f64) / s.s()))
                        / counts[m].sqrt()
                }
            };
            let p1 = random_jet(&mut rng, x0, d, Some(f), a)?;
            let shift = random_jet(&mut rng, x0, d, Some(0.0), |m| {
                if f == 0.0 {
                    0.0
                } else {
                    a(m).min(scale * delta.powf(s.s() - m as f64) / counts[m].sqrt())
                }
            })?;
            let p2 = p1.add(&shift)?;
            let q2 = random_jet(&mut rng, x0, d, None, |m| 0.5 * delta.powi(-(m as i32)))?;
            if !order_bounds_hold(&q2, |m| delta.powi(-(m as i32))) {
                rejections += 1;
            } else {
                let w = combine_witness(f, delta, p1, p2, q2, s)?;
                if order_bounds_hold(&w.q1, |m| delta.powi(-(m as i32))) {
                    break w;
                }
                rejections += 1;
            }
            if rejections > MAX_REJECTIONS {
                return Err(Error::GenerationFailed(rejections));
            }
        };
        out.push(witness);
    }
    Ok(out)
}
