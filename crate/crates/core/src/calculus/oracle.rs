use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::bump::{bump_derivatives, cutoff_derivatives, MAX_BUMP_ORDER};
use super::fdb::{compose_jet, power_jet};
use crate::error::{Error, Result};
use crate::jets::basis::basis;
use crate::jets::Jet;

/// A closed axis-aligned box; bounds may be infinite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<AxisBox> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.is_empty() || lo.iter().zip(&hi).any(|(a, b)| a.is_nan() || b.is_nan() || a > b) {
            return Err(Error::InvalidArgument(format!("invalid box {lo:?} .. {hi:?}")));
        }
        Ok(AxisBox { lo, hi })
    }

    /// The cube `[a, b]^n`.
    pub fn cube(n: usize, a: f64, b: f64) -> AxisBox {
        AxisBox {
            lo: vec![a; n],
            hi: vec![b; n],
        }
    }

    pub fn whole(n: usize) -> AxisBox {
        AxisBox::cube(n, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    pub fn contains_box(&self, other: &AxisBox) -> bool {
        self.lo.iter().zip(&other.lo).all(|(a, b)| a <= b)
            && self.hi.iter().zip(&other.hi).all(|(a, b)| a >= b)
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.iter().chain(&self.hi).all(|v| v.is_finite())
    }

    pub fn intersect(&self, other: &AxisBox) -> AxisBox {
        AxisBox {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(*b)).collect(),
        }
    }
}

/// A smooth function that can report its jet of any order at any point.
///
/// Implementations must be deterministic and safe to call concurrently.
pub trait JetOracle: Send + Sync {
    fn dim(&self) -> usize;

    /// The closed box on which the function is defined.
    fn domain(&self) -> AxisBox {
        AxisBox::whole(self.dim())
    }

    /// The jet of degree `order` at `x`.
    fn jet(&self, x: &[f64], order: usize) -> Result<Jet>;

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.jet(x, 0)?.value())
    }
}

impl<T: JetOracle + ?Sized> JetOracle for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn domain(&self) -> AxisBox {
        (**self).domain()
    }
    fn jet(&self, x: &[f64], order: usize) -> Result<Jet> {
        (**self).jet(x, order)
    }
    fn value(&self, x: &[f64]) -> Result<f64> {
        (**self).value(x)
    }
}

pub(crate) fn check_dim(expected: usize, x: &[f64]) -> Result<()> {
    if x.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: x.len(),
        });
    }
    Ok(())
}

fn check_bump_order(order: usize) -> Result<()> {
    if order > MAX_BUMP_ORDER {
        return Err(Error::OrderExceeded {
            order,
            degree: MAX_BUMP_ORDER,
        });
    }
    Ok(())
}

/// Jet of `Π_j f_j(x_j)` from per-coordinate derivative lists.
pub(crate) fn tensor_jet(x: &[f64], order: usize, per_coord: &[Vec<f64>]) -> Jet {
    let b = basis(x.len(), order);
    let dense: Vec<f64> = b
        .indices
        .iter()
        .map(|a| {
            a.entries()
                .iter()
                .zip(per_coord)
                .map(|(&k, d)| d[k as usize])
                .product()
        })
        .collect();
    Jet::from_dense(&b, x.to_vec(), &dense)
}

fn scaled_profile(
    x: &[f64],
    center: &[f64],
    radius: f64,
    order: usize,
    profile: fn(f64, usize) -> Vec<f64>,
) -> Option<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(x.len());
    for (xi, ci) in x.iter().zip(center) {
        let t = (xi - ci) / radius;
        if t.abs() >= 1.0 {
            return None;
        }
        let mut d = profile(t, order);
        let mut scale = 1.0;
        for v in d.iter_mut() {
            *v *= scale;
            scale /= radius;
        }
        out.push(d);
    }
    Some(out)
}

/// `x ↦ φ₀((x − center)/radius)`.
#[derive(Clone, Debug)]
pub struct ScaledBump {
    center: Vec<f64>,
    radius: f64,
}

impl ScaledBump {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<ScaledBump> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("bump radius {radius} must be positive")));
        }
        Ok(ScaledBump { center, radius })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Convenience constructor returning a boxed oracle.
pub fn scaled_bump(center: &[f64], radius: f64) -> Result<ScaledBump> {
    ScaledBump::new(center.to_vec(), radius)
}

impl JetOracle for ScaledBump {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn jet(&self, x: &[f64], order: usize) -> Result<Jet> {
        check_dim(self.dim(), x)?;
        check_bump_order(order)?;
        match scaled_profile(x, &self.center, self.radius, order, bump_derivatives) {
            Some(p) => Ok(tensor_jet(x, order, &p)),
            None => Ok(Jet::zero(x.to_vec(), order)),
        }
    }
}

/// `x ↦ Π_j χ₁((x_j − center_j)/radius)`: supported in the cube of half-side
/// `radius`, equal to 1 to infinite order at `center`.
#[derive(Clone, Debug)]
pub struct FlatTopCutoff {
    center: Vec<f64>,
    radius: f64,
}

impl FlatTopCutoff {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<FlatTopCutoff> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("cutoff radius {radius} must be positive")));
        }
        Ok(FlatTopCutoff { center, radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn support(&self) -> AxisBox {
        AxisBox {
            lo: self.center.iter().map(|c| c - self.radius).collect(),
            hi: self.center.iter().map(|c| c + self.radius).collect(),
        }
    }
}

impl JetOracle for FlatTopCutoff {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn jet(&self, x: &[f64], order: usize) -> Result<Jet> {
        check_dim(self.dim(), x)?;
        check_bump_order(order)?;
        match scaled_profile(x, &self.center, self.radius, order, cutoff_derivatives) {
            Some(p) => Ok(tensor_jet(x, order, &p)),
            None => Ok(Jet::zero(x.to_vec(), order)),
        }
    }
}

/// A polynomial, given as a jet at some basepoint.
#[derive(Clone, Debug)]
pub struct PolynomialOracle {
    poly: Jet,
}

impl PolynomialOracle {
    pub fn new(poly: Jet) -> PolynomialOracle {
        PolynomialOracle { poly }
    }
}

impl JetOracle for PolynomialOracle {
    fn dim(&self) -> usize {
        self.poly.dim()
    }

    fn jet(&self, x: &[f64], order: usize) -> Result<Jet> {
        check_dim(self.dim(), x)?;
        Ok(self.poly.recenter(x).with_degree(order))
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x)?;
        Ok(self.poly.eval(x))
    }
}

/// The zero function.
#[derive(Clone, Copy, Debug)]
pub struct ZeroOracle {
    pub dim: usize,
}

impl JetOracle for ZeroOracle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn jet(&self, x: &[f64], order: usize) -> Result<Jet> {
        check_dim(self.dim, x)?;
        Ok(Jet::zero(x.to_vec(), order))
    }
}

type JetFn = dyn Fn(&[f64], usize) -> Result<Jet> + Send + Sync;

/// An oracle backed by a closure returning jets.
pub struct FnOracle {
    dim: usize,
    domain: AxisBox,
    f: Box<JetFn>,
}

impl FnOracle {
    pub fn new(
        dim: usize,
        f: impl Fn(&[f64], usize) -> Result<Jet> + Send + Sync + 'static,
    ) -> FnOracle {
        FnOracle {
            dim,
            domain: AxisBox::whole(dim),
            f: Box::new(f),
        }
    }

    pub fn with_domain(mut self, domain: AxisBox) -> FnOracle {
        self.domain = domain;
        self
    }
}

impl JetOracle for FnOracle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn domain(&self) -> AxisBox {
        self.domain.clone()
    }

    fn jet(&self, x: &[f64], order: usize) -> Result<Jet> {
        check_dim(self.dim, x)?;
        (self.f)(x, order)
    }
}

/// `c · F`.
pub struct ScaledOracle {
    inner: Arc<dyn JetOracle>,
    factor: f64,
}

impl ScaledOracle {
    pub fn new(inner: Arc<dyn JetOracle>, factor: f64) -> ScaledOracle {
        ScaledOracle { inner, factor }
    }
}

impl JetOracle for ScaledOracle {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn domain(&self) -> AxisBox {
        self.inner.domain()
    }

    fn jet(&self, x: &[f64], order: usize) -> Result<Jet> {
        Ok(self.inner.jet(x, order)?.scale(self.factor))
    }
}

/// `F₁ · F₂ ⋯ F_k` via truncated jet products.
pub struct ProductOracle {
    factors: Vec<Arc<dyn JetOracle>>,
}

impl ProductOracle {
    pub fn new(factors: Vec<Arc<dyn JetOracle>>) -> Result<ProductOracle> {
        let first = factors
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
        let n = first.dim();
        if let Some(f) = factors.iter().find(|f| f.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.dim(),
            });
        }
        Ok(ProductOracle { factors })
    }
}

impl JetOracle for ProductOracle {
    fn dim(&self) -> usize {
        self.factors[0].dim()
    }

    fn domain(&self) -> AxisBox {
        self.factors
            .iter()
            .skip(1)
            .fold(self.factors[0].domain(), |acc, f| acc.intersect(&f.domain()))
    }

    fn jet(&self, x: &[f64], order: usize) -> Result<Jet> {
        let mut acc = self.factors[0].jet(x, order)?;
        for f in &self.factors[1..] {
            if acc.is_zero() {
                break;
            }
            acc = acc.multiply(&f.jet(x, order)?)?;
        }
        Ok(acc)
    }
}

/// `F^r` for a nonnegative flat `F` and `r ∈ (0, 1]`.
///
/// Where `F` underflows to zero the jet of `F^r` is reported as zero: for
/// `F ∈ F^s` and orders below `r·s` the derivatives of `F^r` tend to 0 at
/// the zeros of `F`.
pub struct PowerOracle {
    inner: Arc<dyn JetOracle>,
    r: f64,
}

impl PowerOracle {
    pub fn new(inner: Arc<dyn JetOracle>, r: f64) -> Result<PowerOracle> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::InvalidArgument(format!("exponent r = {r} not in (0, 1]")));
        }
        Ok(PowerOracle { inner, r })
    }
}

impl JetOracle for PowerOracle {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn domain(&self) -> AxisBox {
        self.inner.domain()
    }

    fn jet(&self, x: &[f64], order: usize) -> Result<Jet> {
        let j = self.inner.jet(x, order)?;
        if j.value() < super::fdb::POWER_ZERO && j.value() >= 0.0 {
            return Ok(Jet::zero(x.to_vec(), order));
        }
        power_jet(&j, self.r)
    }
}

/// `x ↦ |x − center|^p` for `p > 0`, computed by composing `t ↦ t^{p/2}`
/// with `|x − center|²`. The jet at the center is reported as zero, which is
/// exact for orders below `p`.
#[derive(Clone, Debug)]
pub struct RadialPower {
    center: Vec<f64>,
    p: f64,
}

impl RadialPower {
    pub fn new(center: Vec<f64>, p: f64) -> Result<RadialPower> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("radial exponent {p} must be positive")));
        }
        Ok(RadialPower { center, p })
    }
}

impl JetOracle for RadialPower {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn jet(&self, x: &[f64], order: usize) -> Result<Jet> {
        check_dim(self.dim(), x)?;
        let h: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        let r2: f64 = h.iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            return Ok(Jet::zero(x.to_vec(), order));
        }
        let b = basis(x.len(), order);
        let mut dense = vec![0.0; b.len()];
        for (i, a) in b.indices.iter().enumerate() {
            dense[i] = match b.orders[i] {
                0 => r2,
                1 => {
                    let j = a.entries().iter().position(|&e| e == 1).unwrap();
                    2.0 * h[j]
                }
                2 if a.entries().contains(&2) => 2.0,
                _ => 0.0,
            };
        }
        let inner = Jet::from_dense(&b, x.to_vec(), &dense);
        let half = self.p / 2.0;
        Ok(compose_jet(&inner, &|k, t| {
            falling(half, k) * t.powf(half - k as f64)
        }))
    }
}

/// Falling factorial `r(r−1)⋯(r−k+1)`.
pub fn falling(r: f64, k: usize) -> f64 {
    (0..k).map(|i| r - i as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::bump::{bump_g, phi0};
    use crate::jets::MultiIndex;

    #[test]
    fn unit_bump_is_phi0() {
        let b = scaled_bump(&[0.0, 0.0], 1.0).unwrap();
        let x = [0.3, -0.4];
        let j = b.jet(&x, 2).unwrap();
        for (a, c) in j.coeffs() {
            assert_eq!(*c, phi0(&x, a.entries()));
        }
        assert_eq!(j.value(), phi0(&x, &[0, 0]));
    }

    #[test]
    fn bump_derivatives_scale() {
        let half = scaled_bump(&[0.0], 0.5).unwrap();
        let d2 = half.jet(&[0.0], 2).unwrap().coeff(&MultiIndex::new(&[2]));
        assert!((d2 - 4.0 * bump_g(0.0, 2)).abs() < 1e-14);
        assert!(scaled_bump(&[0.0], 0.0).is_err());
        assert!(scaled_bump(&[0.0], -1.0).is_err());
    }

    #[test]
    fn polynomial_oracle_extends_degree() {
        let p = Jet::from_slices(&[0.0], 2, &[(&[2], 2.0)]).unwrap();
        let o = PolynomialOracle::new(p);
        let j = o.jet(&[3.0], 4).unwrap();
        assert_eq!(j.degree(), 4);
        assert_eq!(j.value(), 9.0);
        assert_eq!(j.coeff(&MultiIndex::new(&[1])), 6.0);
        assert_eq!(j.coeff(&MultiIndex::new(&[3])), 0.0);
    }

    #[test]
    fn radial_power_matches_closed_form() {
        let o = RadialPower::new(vec![1.0, 0.0], 3.0).unwrap();
        let x = [1.6, 0.8];
        let j = o.jet(&x, 1).unwrap();
        let r: f64 = (0.36f64 + 0.64).sqrt();
        assert!((j.value() - r.powi(3)).abs() < 1e-14);
        // ∂_1 |h|³ = 3|h| h_1
        assert!((j.coeff(&MultiIndex::new(&[1, 0])) - 3.0 * r * 0.6).abs() < 1e-13);
        assert!(o.jet(&[1.0, 0.0], 2).unwrap().is_zero());
    }
}
