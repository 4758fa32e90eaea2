//! JSON problem instances shared by the command-line tools.
//!
//! ```json
//! {"n": 1, "s": 2.0, "points": [{"x": [0.3], "f": 0.09}, {"x": [0.8], "jet": {"(0)": 0.64, "(1)": 1.6}}]}
//! ```
//!
//! Points given only by a value are promoted to the jet whose derivatives all
//! vanish. This is always a member of `Γ_f(x, f(x))`, but it is a choice and
//! usually not the jet of smallest norm.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::calculus::{
    AxisBox, FlatTopCutoff, JetOracle, PolynomialOracle, ProductOracle, RadialPower, ScaledBump,
    ScaledOracle,
};
use crate::error::{Error, Result};
use crate::jets::{first_duplicate, Jet, MultiIndex, Smoothness, WhitneyField};

pub const MAX_DIM: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstancePoint {
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<f64>,
    /// Derivative-form coefficients keyed by multi-index, e.g. `"(1,0)"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jet: Option<BTreeMap<String, f64>>,
}

/// A member of a test family of functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyMember {
    /// `scale · φ₀((x − center)/radius)`.
    Bump {
        center: Vec<f64>,
        radius: f64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
    },
    /// `|x − center|^p · φ₀((x − center)/radius)`.
    PowerBump { center: Vec<f64>, p: f64, radius: f64 },
    /// Flat-top cutoff, identically 1 on the ball of radius `radius/2`.
    Cutoff { center: Vec<f64>, radius: f64 },
    /// A polynomial given by its jet.
    Polynomial { jet: Jet },
}

fn one() -> f64 {
    1.0
}

fn is_one(v: &f64) -> bool {
    *v == 1.0
}

impl FamilyMember {
    pub fn dim(&self) -> usize {
        match self {
            FamilyMember::Bump { center, .. }
            | FamilyMember::PowerBump { center, .. }
            | FamilyMember::Cutoff { center, .. } => center.len(),
            FamilyMember::Polynomial { jet } => jet.dim(),
        }
    }

    pub fn oracle(&self) -> Result<Arc<dyn JetOracle>> {
        Ok(match self {
            FamilyMember::Bump {
                center,
                radius,
                scale,
            } => {
                let b: Arc<dyn JetOracle> = Arc::new(ScaledBump::new(center.clone(), *radius)?);
                if *scale == 1.0 {
                    b
                } else {
                    Arc::new(ScaledOracle::new(b, *scale))
                }
            }
            FamilyMember::PowerBump { center, p, radius } => Arc::new(ProductOracle::new(vec![
                Arc::new(RadialPower::new(center.clone(), *p)?),
                Arc::new(ScaledBump::new(center.clone(), *radius)?),
            ])?),
            FamilyMember::Cutoff { center, radius } => {
                Arc::new(FlatTopCutoff::new(center.clone(), *radius)?)
            }
            FamilyMember::Polynomial { jet } => Arc::new(PolynomialOracle::new(jet.clone())),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub n: usize,
    pub s: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<InstancePoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_box: Option<AxisBox>,
    /// Samples per axis for grid output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    /// Points at which `eval-jets` reports the extension's jet.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_points: Option<Vec<Vec<f64>>>,
    /// Exponent for `root` and `fdb`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Input jet for `fdb`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jet: Option<Jet>,
    /// Functions for `norms` and `root`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub family: Vec<FamilyMember>,
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Instance> {
        let inst: Instance = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn smoothness(&self) -> Result<Smoothness> {
        Smoothness::new(self.s).map_err(|_| Error::schema("s", format!("{} is not a valid smoothness", self.s)))
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_DIM).contains(&self.n) {
            return Err(Error::schema("n", format!("{} not in [1, {MAX_DIM}]", self.n)));
        }
        self.smoothness()?;
        let n = self.n;
        let check_dim = |path: String, len: usize| {
            if len != n {
                Err(Error::schema(path, format!("has dimension {len}, expected {n}")))
            } else {
                Ok(())
            }
        };
        for (i, p) in self.points.iter().enumerate() {
            check_dim(format!("points[{i}].x"), p.x.len())?;
            if p.x.iter().any(|v| !v.is_finite()) {
                return Err(Error::schema(format!("points[{i}].x"), "non-finite coordinate"));
            }
            if p.f.is_none() && p.jet.is_none() {
                return Err(Error::schema(format!("points[{i}]"), "needs `f` or `jet`"));
            }
            if let Some(f) = p.f {
                if !(f >= 0.0) || !f.is_finite() {
                    return Err(Error::schema(format!("points[{i}].f"), format!("{f} is not a nonnegative number")));
                }
            }
        }
        if let Some(p) = first_duplicate(self.points.iter().map(|p| p.x.as_slice())) {
            return Err(Error::schema("points", format!("duplicate point {p:?}")));
        }
        if !self.points.is_empty() {
            self.field()?;
        }
        if let Some(b) = &self.bound_box {
            check_dim("bound_box".into(), b.dim())?;
        }
        if self.grid == Some(0) {
            return Err(Error::schema("grid", "must be positive"));
        }
        for (i, x) in self.eval_points.iter().flatten().enumerate() {
            check_dim(format!("eval_points[{i}]"), x.len())?;
        }
        if let Some(r) = self.r {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::schema("r", format!("{r} must be positive")));
            }
        }
        if let Some(j) = &self.jet {
            check_dim("jet.basepoint".into(), j.dim())?;
        }
        for (i, m) in self.family.iter().enumerate() {
            check_dim(format!("family[{i}]"), m.dim())?;
            m.oracle()
                .map_err(|e| Error::schema(format!("family[{i}]"), e.to_string()))?;
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.x.clone()).collect()
    }

    /// Values `f(x)`, taken from the jet where `f` is absent.
    pub fn values(&self) -> Result<Vec<f64>> {
        Ok(self.field()?.jets().iter().map(|j| j.value()).collect())
    }

    /// The Whitney field of degree `⌊s⌋`, promoting value-only points to
    /// zero-derivative jets.
    pub fn field(&self) -> Result<WhitneyField> {
        if self.points.is_empty() {
            return Err(Error::schema("points", "no points given"));
        }
        let d = self.smoothness()?.floor();
        let mut jets = Vec::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            let path = format!("points[{i}].jet");
            let jet = match &p.jet {
                None => Jet::constant(p.x.clone(), d, p.f.unwrap_or(0.0)),
                Some(map) => {
                    let mut coeffs = Vec::with_capacity(map.len());
                    for (key, &v) in map {
                        let a = MultiIndex::parse_key(key)
                            .ok_or_else(|| Error::schema(path.clone(), format!("bad multi-index {key:?}")))?;
                        coeffs.push((a, v));
                    }
                    let jet = Jet::new(p.x.clone(), d, coeffs)
                        .map_err(|e| Error::schema(path.clone(), e.to_string()))?;
                    if let Some(f) = p.f {
                        if (jet.value() - f).abs() > 1e-12 * f.max(1.0) {
                            return Err(Error::schema(
                                path,
                                format!("value {} disagrees with f = {f}", jet.value()),
                            ));
                        }
                    }
                    if jet.value() < 0.0 {
                        return Err(Error::schema(path, "negative value"));
                    }
                    jet
                }
            };
            jets.push(jet);
        }
        WhitneyField::new(jets)
    }

    /// The given box, or the bounding box of the points padded by 1.
    pub fn bound_box(&self) -> AxisBox {
        if let Some(b) = &self.bound_box {
            return b.clone();
        }
        let mut lo = vec![f64::INFINITY; self.n];
        let mut hi = vec![f64::NEG_INFINITY; self.n];
        for p in &self.points {
            for k in 0..self.n {
                lo[k] = lo[k].min(p.x[k]);
                hi[k] = hi[k].max(p.x[k]);
            }
        }
        if self.points.is_empty() {
            return AxisBox::cube(self.n, -1.0, 1.0);
        }
        AxisBox::new(
            lo.iter().map(|v| v - 1.0).collect(),
            hi.iter().map(|v| v + 1.0).collect(),
        )
        .expect("padded bounding box is nonempty")
    }
}

/// Coefficient map of a jet in the instance format.
pub fn jet_to_map(jet: &Jet) -> BTreeMap<String, f64> {
    jet.coeffs().iter().map(|(a, &c)| (a.key(), c)).collect()
}
