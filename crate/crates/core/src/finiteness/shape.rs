use crate::error::{Error, Result};
use crate::jets::{first_duplicate, Jet, Smoothness};
use crate::norms::{gamma_member, GammaSpec};

/// Relative tolerance for the pinned value `P(x) = f(x)`.
pub const VALUE_TOL: f64 = 1e-12;

/// Whether `P ∈ Γ_f(x, M)`: `P ∈ Γ(x, M)` and `P(x) = f(x)` up to
/// `1e−12 · max(1, f(x))`.
pub fn gamma_f_member(jet: &Jet, x: &[f64], m: f64, f_value: f64, s: Smoothness) -> Result<bool> {
    if !(f_value >= 0.0) {
        return Err(Error::NotNonnegative {
            point: x.to_vec(),
            value: f_value,
        });
    }
    let local;
    let jet = if jet.basepoint() == x {
        jet
    } else {
        local = jet.recenter(x);
        &local
    };
    if (jet.value() - f_value).abs() > VALUE_TOL * f_value.max(1.0) {
        return Ok(false);
    }
    Ok(gamma_member(jet, &GammaSpec::new(x.to_vec(), m.max(0.0))?, s))
}

/// Nonnegative data `f` on a finite set `E` together with the classes `Γ_f(x, M)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeFieldSpec {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    s: Smoothness,
}

impl ShapeFieldSpec {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>, s: Smoothness) -> Result<ShapeFieldSpec> {
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
        let n = points[0].len();
        if let Some(p) = points.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
        for (p, &v) in points.iter().zip(&values) {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::NotNonnegative {
                    point: p.clone(),
                    value: v,
                });
            }
        }
        if let Some(p) = first_duplicate(points.iter().map(|p| p.as_slice())) {
            return Err(Error::DuplicatePoint(p.to_vec()));
        }
        Ok(ShapeFieldSpec { points, values, s })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn smoothness(&self) -> Smoothness {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Whether `P ∈ Γ_f(x_i, M)` for the `i`-th point.
    pub fn membership(&self, i: usize, m: f64, jet: &Jet) -> Result<bool> {
        gamma_f_member(jet, &self.points[i], m, self.values[i], self.s)
    }

    /// The sub-problem on the given positions.
    pub fn restrict(&self, positions: &[usize]) -> ShapeFieldSpec {
        ShapeFieldSpec {
            points: positions.iter().map(|&i| self.points[i].clone()).collect(),
            values: positions.iter().map(|&i| self.values[i]).collect(),
            s: self.s,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let s = Smoothness::new(2.0).unwrap();
        let c = Jet::constant(vec![0.0], 1, 0.7);
        assert!(gamma_f_member(&c, &[0.0], 0.7, 0.7, s).unwrap());
        assert!(!gamma_f_member(&c, &[0.0], 5.0, 0.6, s).unwrap());
        let p = Jet::from_slices(&[0.0], 1, &[(&[0], 1.0), (&[1], 1.0)]).unwrap();
        assert!(gamma_f_member(&p, &[0.0], 1.0, 1.0, s).unwrap());
        assert!(gamma_f_member(&p, &[0.0], 1.0, -1.0, s).is_err());
    }

    #[test]
    fn spec_validation() {
        let s = Smoothness::new(2.0).unwrap();
        assert!(ShapeFieldSpec::new(vec![vec![0.0]], vec![-1.0], s).is_err());
        assert!(ShapeFieldSpec::new(vec![vec![0.0], vec![0.0]], vec![1.0, 1.0], s).is_err());
        let spec = ShapeFieldSpec::new(vec![vec![0.0], vec![1.0]], vec![0.0, 1.0], s).unwrap();
        assert!(spec.membership(0, 0.0, &Jet::zero(vec![0.0], 1)).unwrap());
    }
}
