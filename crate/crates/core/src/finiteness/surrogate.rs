//! Minimal Whitney-field norm for value data, by bisection over convex
//! feasibility problems solved with cyclic projections.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::jets::basis::basis;
use crate::jets::{Jet, Smoothness, WhitneyField};
use crate::norms::whitney_field_norm_parts;

#[derive(Clone, Copy, Debug)]
pub struct SurrogateOptions {
    /// Relative bracket width at which bisection stops.
    pub rel_tol: f64,
    pub max_bisections: usize,
    /// Projection sweeps per feasibility problem.
    pub sweeps: usize,
    /// Total projection sweeps allowed across the whole solve.
    pub budget: usize,
    /// Feasibility threshold on the constraint residual, relative to `max(1, M)`.
    pub residual_tol: f64,
}

impl Default for SurrogateOptions {
    fn default() -> Self {
        SurrogateOptions {
            rel_tol: 1e-3,
            max_bisections: 40,
            sweeps: 500,
            budget: 40 * 500,
            residual_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SurrogateResult {
    /// Exact max-form norm of `field`; an upper bound for the minimum.
    pub value: f64,
    /// The best field found, with `P_x(x) = f(x)`.
    pub field: WhitneyField,
    /// Final bisection bracket.
    pub lo: f64,
    pub hi: f64,
    pub sweeps: usize,
}

/// `{z : ‖A z_vars + b‖ ≤ r}`, with the eigen-decomposition of `AAᵀ` cached.
struct PairConstraint {
    vars: Vec<usize>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    /// `|x − y|^{s−m}`; the radius is `M` times this.
    scale: f64,
    eig_vectors: DMatrix<f64>,
    eig_values: DVector<f64>,
}

/// `{z : ‖z_block‖ ≤ r}`.
struct BallConstraint {
    vars: Vec<usize>,
    m: usize,
    f: f64,
}

struct Problem {
    s: Smoothness,
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    /// Per point: number of free coefficients (orders 1..=d).
    width: usize,
    balls: Vec<BallConstraint>,
    pairs: Vec<PairConstraint>,
}

impl Problem {
    fn new(points: &[Vec<f64>], values: &[f64], s: Smoothness) -> Problem {
        let n = points[0].len();
        let d = s.floor();
        let b = basis(n, d);
        let width = b.len() - 1;
        let var = |i: usize, k: usize| i * width + k - 1;
        let mut balls = Vec::new();
        for i in 0..points.len() {
            for m in 1..=d {
                let vars = (1..b.len()).filter(|&k| b.orders[k] == m).map(|k| var(i, k)).collect();
                balls.push(BallConstraint {
                    vars,
                    m,
                    f: values[i],
                });
            }
        }
        let mut pairs = Vec::new();
        for (i, xi) in points.iter().enumerate() {
            for (j, xj) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let h: Vec<f64> = xj.iter().zip(xi).map(|(a, b)| a - b).collect();
                let dist = h.iter().map(|v| v * v).sum::<f64>().sqrt();
                // the re-expansion of P_i at x_j is linear in P_i's coefficients
                let mut unit = vec![0.0; b.len()];
                let mut shift_cols = Vec::with_capacity(b.len());
                for k in 0..b.len() {
                    unit[k] = 1.0;
                    shift_cols.push(b.shift(&unit, &h));
                    unit[k] = 0.0;
                }
                for m in 0..=d {
                    let rows: Vec<usize> = (0..b.len()).filter(|&k| b.orders[k] == m).collect();
                    let mut vars: Vec<usize> = (1..b.len()).map(|k| var(i, k)).collect();
                    if m > 0 {
                        vars.extend(rows.iter().map(|&k| var(j, k)));
                    }
                    let mut a = DMatrix::zeros(rows.len(), vars.len());
                    let mut bv = DVector::zeros(rows.len());
                    for (r, &row) in rows.iter().enumerate() {
                        for k in 1..b.len() {
                            a[(r, k - 1)] = shift_cols[k][row];
                        }
                        bv[r] = shift_cols[0][row] * values[i];
                        if m == 0 {
                            bv[r] -= values[j];
                        } else {
                            a[(r, width + r)] = -1.0;
                        }
                    }
                    let eig = SymmetricEigen::new(&a * a.transpose());
                    pairs.push(PairConstraint {
                        vars,
                        a,
                        b: bv,
                        scale: dist.powf(s.s() - m as f64),
                        eig_vectors: eig.eigenvectors,
                        eig_values: eig.eigenvalues,
                    });
                }
            }
        }
        Problem {
            s,
            points: points.to_vec(),
            values: values.to_vec(),
            width,
            balls,
            pairs,
        }
    }

    fn ball_radius(&self, c: &BallConstraint, big_m: f64) -> f64 {
        let s = self.s.s();
        let m = c.m as f64;
        big_m.min(big_m.powf(m / s) * c.f.powf((s - m) / s))
    }

    fn field(&self, z: &[f64]) -> WhitneyField {
        let n = self.points[0].len();
        let b = basis(n, self.s.floor());
        let jets = self
            .points
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let mut dense = Vec::with_capacity(b.len());
                dense.push(self.values[i]);
                dense.extend_from_slice(&z[i * self.width..(i + 1) * self.width]);
                Jet::from_dense(&b, x.clone(), &dense)
            })
            .collect();
        WhitneyField::new(jets).expect("points validated")
    }

    fn unknowns(&self, field: &WhitneyField) -> Vec<f64> {
        let b = basis(field.dim(), field.degree());
        field
            .jets()
            .iter()
            .flat_map(|j| j.to_dense(&b).into_iter().skip(1))
            .collect()
    }

    /// Cyclic projections at level `M`; returns the final residual and sweeps used.
    fn project(&self, z: &mut [f64], big_m: f64, sweeps: usize, tol: f64) -> (f64, usize) {
        let mut last = f64::INFINITY;
        let mut stalled = 0;
        for sweep in 1..=sweeps {
            for c in &self.balls {
                let r = self.ball_radius(c, big_m);
                project_ball(z, &c.vars, r);
            }
            for c in &self.pairs {
                project_pair(z, c, big_m * c.scale);
            }
            let res = self.residual(z, big_m);
            if res <= tol {
                return (res, sweep);
            }
            if res > 0.999 * last {
                stalled += 1;
                if stalled >= 25 {
                    return (res, sweep);
                }
            } else {
                stalled = 0;
            }
            last = res;
        }
        (self.residual(z, big_m), sweeps)
    }

    fn residual(&self, z: &[f64], big_m: f64) -> f64 {
        let mut worst = 0.0f64;
        for c in &self.balls {
            let norm = c.vars.iter().map(|&v| z[v] * z[v]).sum::<f64>().sqrt();
            worst = worst.max(norm - self.ball_radius(c, big_m));
        }
        for c in &self.pairs {
            let w = pair_image(z, c);
            worst = worst.max(w.norm() - big_m * c.scale);
        }
        worst
    }
}

fn project_ball(z: &mut [f64], vars: &[usize], r: f64) {
    let norm = vars.iter().map(|&v| z[v] * z[v]).sum::<f64>().sqrt();
    if norm > r {
        let k = if norm > 0.0 { r / norm } else { 0.0 };
        for &v in vars {
            z[v] *= k;
        }
    }
}

fn pair_image(z: &[f64], c: &PairConstraint) -> DVector<f64> {
    let local = DVector::from_iterator(c.vars.len(), c.vars.iter().map(|&v| z[v]));
    &c.a * local + &c.b
}

/// Euclidean projection onto `{‖A v + b‖ ≤ r}`: `v = v₀ − Aᵀ μ` with
/// `μ = λ (I + λ AAᵀ)^{−1} y`, `y = A v₀ + b`, and `λ` solving `‖w(λ)‖ = r`.
fn project_pair(z: &mut [f64], c: &PairConstraint, r: f64) {
    let y = pair_image(z, c);
    if y.norm() <= r {
        return;
    }
    let yh = c.eig_vectors.transpose() * &y;
    let e = &c.eig_values;
    let top = e.iter().fold(0.0f64, |a, &b| a.max(b));
    let null_tol = 1e-14 * top.max(1e-300);
    let norm_at = |lambda: f64| -> f64 {
        yh.iter()
            .zip(e.iter())
            .map(|(&v, &ev)| {
                let ev = if ev > null_tol { ev } else { 0.0 };
                let q = v / (1.0 + lambda * ev);
                q * q
            })
            .sum::<f64>()
            .sqrt()
    };
    let reachable = norm_at(f64::INFINITY);
    let mu: DVector<f64> = if reachable >= r {
        // the constraint cannot be met: move to the closest attainable image
        DVector::from_iterator(
            yh.len(),
            yh.iter()
                .zip(e.iter())
                .map(|(&v, &ev)| if ev > null_tol { v / ev } else { 0.0 }),
        )
    } else {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while norm_at(hi) > r {
            hi *= 4.0;
            if hi > 1e300 {
                break;
            }
        }
        let mut lambda = hi;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if norm_at(mid) > r {
                lo = mid;
            } else {
                hi = mid;
            }
            lambda = hi;
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        DVector::from_iterator(
            yh.len(),
            yh.iter()
                .zip(e.iter())
                .map(|(&v, &ev)| {
                    let ev = if ev > null_tol { ev } else { 0.0 };
                    lambda * v / (1.0 + lambda * ev)
                }),
        )
    };
    let step = c.a.transpose() * (&c.eig_vectors * mu);
    for (k, &v) in c.vars.iter().enumerate() {
        z[v] -= step[k];
    }
}

/// The smallest max-form Whitney-field norm over fields with `P_x(x) = f(x)`,
/// as found by bisection on `M`. `start` optionally warm-starts the search
/// with a field on the same points; its norm caps the result.
pub fn surrogate_local_norm(
    points: &[Vec<f64>],
    values: &[f64],
    s: Smoothness,
    start: Option<&WhitneyField>,
    options: SurrogateOptions,
) -> Result<SurrogateResult> {
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    if points.len() != values.len() {
        return Err(Error::InvalidArgument(format!(
            "{} points but {} values",
            points.len(),
            values.len()
        )));
    }
    for (p, &v) in points.iter().zip(values) {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::NotNonnegative {
                point: p.clone(),
                value: v,
            });
        }
    }
    let problem = Problem::new(points, values, s);
    let mut best = match start {
        Some(f) => {
            if f.points() != points {
                return Err(Error::InvalidArgument("warm start field is on other points".into()));
            }
            problem.unknowns(f)
        }
        None => vec![0.0; points.len() * problem.width],
    };
    let norm_of = |z: &[f64]| -> Result<f64> {
        Ok(whitney_field_norm_parts(&problem.field(z), s)?.max_form())
    };
    let mut best_value = norm_of(&best)?;
    let mut warm = best.clone();
    let mut lo = values.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut hi = best_value;
    let mut used = 0usize;
    let mut iterations = 0usize;
    while hi - lo > options.rel_tol * hi && iterations < options.max_bisections {
        if used >= options.budget {
            return Err(Error::BudgetExhausted { lo, hi });
        }
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let mut z = warm.clone();
        let tol = options.residual_tol * mid.max(1.0);
        let sweeps = options.sweeps.min(options.budget - used);
        let (res, n) = problem.project(&mut z, mid, sweeps, tol);
        used += n;
        if res <= tol {
            hi = mid;
            let v = norm_of(&z)?;
            if v <= best_value {
                best_value = v;
                best = z.clone();
            }
            warm = z;
        } else {
            lo = mid;
        }
    }
    Ok(SurrogateResult {
        value: best_value,
        field: problem.field(&best),
        lo,
        hi,
        sweeps: used,
    })
}
