use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use super::basis::{basis, Basis};
use super::multiindex::{multiindices_of_order, MultiIndex};
use crate::error::{Error, Result};

/// A polynomial of degree at most `degree`, stored by its derivatives at a basepoint.
///
/// The coefficient at `α` is `∂^αP(x₀)`, so evaluation reads
/// `P(x) = Σ ∂^αP(x₀)(x − x₀)^α / α!`. Exact zeros are not stored.
#[derive(Clone, PartialEq)]
pub struct Jet {
    basepoint: Vec<f64>,
    degree: usize,
    coeffs: BTreeMap<MultiIndex, f64>,
}

impl Jet {
    pub fn new(
        basepoint: Vec<f64>,
        degree: usize,
        coeffs: impl IntoIterator<Item = (MultiIndex, f64)>,
    ) -> Result<Jet> {
        let n = basepoint.len();
        if n == 0 {
            return Err(Error::InvalidArgument("jet basepoint has no coordinates".into()));
        }
        if basepoint.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite basepoint {basepoint:?}"
            )));
        }
        let mut map = BTreeMap::new();
        for (alpha, value) in coeffs {
            if alpha.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: alpha.dim(),
                });
            }
            if alpha.order() > degree {
                return Err(Error::OrderExceeded {
                    order: alpha.order(),
                    degree,
                });
            }
            if !value.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite coefficient at {alpha}"
                )));
            }
            if value != 0.0 {
                map.insert(alpha, value);
            }
        }
        Ok(Jet {
            basepoint,
            degree,
            coeffs: map,
        })
    }

    /// Convenience constructor from raw index slices.
    pub fn from_slices(basepoint: &[f64], degree: usize, coeffs: &[(&[u32], f64)]) -> Result<Jet> {
        Jet::new(
            basepoint.to_vec(),
            degree,
            coeffs.iter().map(|(a, v)| (MultiIndex::new(a), *v)),
        )
    }

    pub fn zero(basepoint: Vec<f64>, degree: usize) -> Jet {
        Jet {
            basepoint,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(basepoint: Vec<f64>, degree: usize, value: f64) -> Jet {
        let n = basepoint.len();
        let mut jet = Jet::zero(basepoint, degree);
        if value != 0.0 {
            jet.coeffs.insert(MultiIndex::zero(n), value);
        }
        jet
    }

    pub fn basepoint(&self) -> &[f64] {
        &self.basepoint
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.basepoint.len()
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, f64> {
        &self.coeffs
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> f64 {
        self.coeffs.get(alpha).copied().unwrap_or(0.0)
    }

    /// `P(x₀)`.
    pub fn value(&self) -> f64 {
        self.coeff(&MultiIndex::zero(self.dim()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim(), "evaluation point dimension");
        let h: Vec<f64> = x.iter().zip(&self.basepoint).map(|(a, b)| a - b).collect();
        self.coeffs
            .iter()
            .map(|(alpha, c)| c * alpha.monomial(&h) / alpha.factorial() as f64)
            .sum()
    }

    /// The jet of `∂^βP`, of degree `degree − |β|`.
    pub fn derivative(&self, beta: &MultiIndex) -> Result<Jet> {
        if beta.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: beta.dim(),
            });
        }
        if beta.order() > self.degree {
            return Err(Error::OrderExceeded {
                order: beta.order(),
                degree: self.degree,
            });
        }
        let coeffs = self
            .coeffs
            .iter()
            .filter_map(|(a, &c)| a.checked_sub(beta).map(|rest| (rest, c)))
            .collect();
        Ok(Jet {
            basepoint: self.basepoint.clone(),
            degree: self.degree - beta.order(),
            coeffs,
        })
    }

    /// `|∇^mP(at)| = (Σ_{|α|=m} ∂^αP(at)²)^{1/2}`, without multinomial weights.
    pub fn grad_norm(&self, m: usize, at: &[f64]) -> Result<f64> {
        if m > self.degree {
            return Err(Error::OrderExceeded {
                order: m,
                degree: self.degree,
            });
        }
        if at.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: at.len(),
            });
        }
        if at == self.basepoint.as_slice() {
            return Ok(self.order_norm(m));
        }
        Ok(self.recenter(at).order_norm(m))
    }

    /// `|∇^mP(x₀)|` at the basepoint.
    pub(crate) fn order_norm(&self, m: usize) -> f64 {
        self.coeffs
            .iter()
            .filter(|(a, _)| a.order() == m)
            .map(|(_, c)| c * c)
            .sum::<f64>()
            .sqrt()
    }

    /// All `|∇^mP(x₀)|` for `m = 0..=degree`.
    pub fn order_norms(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.degree + 1];
        for (a, c) in &self.coeffs {
            sums[a.order()] += c * c;
        }
        sums.into_iter().map(f64::sqrt).collect()
    }

    /// The same polynomial expanded at `y`.
    pub fn recenter(&self, y: &[f64]) -> Jet {
        assert_eq!(y.len(), self.dim(), "recentering point dimension");
        if y == self.basepoint.as_slice() {
            return self.clone();
        }
        let b = self.basis();
        let h: Vec<f64> = y.iter().zip(&self.basepoint).map(|(a, b)| a - b).collect();
        let dense = b.shift(&self.to_dense(&b), &h);
        Jet::from_dense(&b, y.to_vec(), &dense)
    }

    /// Truncated product of two jets at the same basepoint and degree.
    pub fn multiply(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let b = self.basis();
        let dense = b.mul(&self.to_dense(&b), &other.to_dense(&b));
        Ok(Jet::from_dense(&b, self.basepoint.clone(), &dense))
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Jet, sign: f64) -> Result<Jet> {
        self.check_compatible(other)?;
        let mut coeffs = self.coeffs.clone();
        for (a, c) in &other.coeffs {
            *coeffs.entry(a.clone()).or_insert(0.0) += sign * c;
        }
        coeffs.retain(|_, c| *c != 0.0);
        Ok(Jet {
            basepoint: self.basepoint.clone(),
            degree: self.degree,
            coeffs,
        })
    }

    pub fn scale(&self, factor: f64) -> Jet {
        let mut coeffs: BTreeMap<MultiIndex, f64> =
            self.coeffs.iter().map(|(a, c)| (a.clone(), c * factor)).collect();
        coeffs.retain(|_, c| *c != 0.0);
        Jet {
            basepoint: self.basepoint.clone(),
            degree: self.degree,
            coeffs,
        }
    }

    /// Drops every coefficient of order above `degree`.
    pub fn truncate(&self, degree: usize) -> Jet {
        Jet {
            basepoint: self.basepoint.clone(),
            degree: degree.min(self.degree),
            coeffs: self
                .coeffs
                .iter()
                .filter(|(a, _)| a.order() <= degree)
                .map(|(a, c)| (a.clone(), *c))
                .collect(),
        }
    }

    /// The same polynomial viewed as a jet of the given degree (truncating if lower).
    pub fn with_degree(&self, degree: usize) -> Jet {
        let mut out = self.truncate(degree);
        out.degree = degree;
        out
    }

    /// Largest absolute coefficient difference, after checking compatibility.
    pub fn max_coeff_diff(&self, other: &Jet) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .sub(other)?
            .coeffs
            .values()
            .fold(0.0_f64, |m, c| m.max(c.abs())))
    }

    fn check_compatible(&self, other: &Jet) -> Result<()> {
        if self.basepoint != other.basepoint || self.degree != other.degree {
            return Err(Error::BasepointMismatch);
        }
        Ok(())
    }

    pub(crate) fn basis(&self) -> std::sync::Arc<Basis> {
        basis(self.dim(), self.degree)
    }

    pub(crate) fn to_dense(&self, b: &Basis) -> Vec<f64> {
        let mut out = vec![0.0; b.len()];
        for (a, c) in &self.coeffs {
            if let Some(i) = b.index_of(a) {
                out[i] = *c;
            }
        }
        out
    }

    pub(crate) fn from_dense(b: &Basis, basepoint: Vec<f64>, dense: &[f64]) -> Jet {
        let coeffs = b
            .indices
            .iter()
            .zip(dense)
            .filter(|(_, &c)| c != 0.0)
            .map(|(a, &c)| (a.clone(), c))
            .collect();
        Jet {
            basepoint,
            degree: b.d,
            coeffs,
        }
    }

    /// Coefficients of order exactly `m`, in graded-lex order, zeros included.
    pub fn order_coeffs(&self, m: usize) -> Vec<f64> {
        multiindices_of_order(self.dim(), m)
            .iter()
            .map(|a| self.coeff(a))
            .collect()
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("basepoint", &self.basepoint)
            .field("degree", &self.degree)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

struct CoeffMap<'a>(&'a BTreeMap<MultiIndex, f64>);

impl Serialize for CoeffMap<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (a, c) in self.0 {
            map.serialize_entry(&a.key(), c)?;
        }
        map.end()
    }
}

impl Serialize for Jet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Jet", 3)?;
        st.serialize_field("basepoint", &self.basepoint)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("coeffs", &CoeffMap(&self.coeffs))?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJet {
    basepoint: Vec<f64>,
    degree: usize,
    #[serde(default)]
    coeffs: HashMap<String, f64>,
}

impl<'de> Deserialize<'de> for Jet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawJet::deserialize(deserializer)?;
        let mut coeffs = Vec::with_capacity(raw.coeffs.len());
        for (key, value) in raw.coeffs {
            let alpha = MultiIndex::parse_key(&key)
                .ok_or_else(|| de::Error::custom(format!("bad multi-index key {key:?}")))?;
            coeffs.push((alpha, value));
        }
        Jet::new(raw.basepoint, raw.degree, coeffs).map_err(de::Error::custom)
    }
}
