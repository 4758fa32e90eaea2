use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use super::jet::Jet;
use crate::error::{Error, Result};

/// A family of jets `(P_x)_{x∈E}` indexed by a finite point set, each based at its point.
#[derive(Clone, Debug, PartialEq)]
pub struct WhitneyField {
    jets: Vec<Jet>,
}

impl WhitneyField {
    /// Validates distinct basepoints and a common dimension and degree.
    pub fn new(jets: Vec<Jet>) -> Result<WhitneyField> {
        let first = jets.first().ok_or(Error::EmptySet)?;
        let (n, d) = (first.dim(), first.degree());
        for jet in &jets {
            if jet.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: jet.dim(),
                });
            }
            if jet.degree() != d {
                return Err(Error::InvalidArgument(format!(
                    "field mixes jet degrees {d} and {}",
                    jet.degree()
                )));
            }
        }
        if let Some(p) = first_duplicate(jets.iter().map(|j| j.basepoint())) {
            return Err(Error::DuplicatePoint(p.to_vec()));
        }
        Ok(WhitneyField { jets })
    }

    pub fn jets(&self) -> &[Jet] {
        &self.jets
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.jets.iter().map(|j| j.basepoint().to_vec()).collect()
    }

    pub fn len(&self) -> usize {
        self.jets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.jets[0].dim()
    }

    pub fn degree(&self) -> usize {
        self.jets[0].degree()
    }

    pub fn scale(&self, factor: f64) -> WhitneyField {
        WhitneyField {
            jets: self.jets.iter().map(|j| j.scale(factor)).collect(),
        }
    }

    /// The sub-field on the given positions.
    pub fn restrict(&self, positions: &[usize]) -> WhitneyField {
        WhitneyField {
            jets: positions.iter().map(|&i| self.jets[i].clone()).collect(),
        }
    }
}

/// First point that occurs twice, compared exactly.
pub(crate) fn first_duplicate<'a>(points: impl Iterator<Item = &'a [f64]>) -> Option<&'a [f64]> {
    let mut sorted: Vec<&[f64]> = points.collect();
    sorted.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    sorted.windows(2).find(|w| w[0] == w[1]).map(|w| w[0])
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry<J> {
    point: Vec<f64>,
    jet: J,
}

impl Serialize for WhitneyField {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.jets.len()))?;
        for jet in &self.jets {
            seq.serialize_element(&Entry {
                point: jet.basepoint().to_vec(),
                jet,
            })?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for WhitneyField {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let entries: Vec<Entry<Jet>> = Vec::deserialize(deserializer)?;
        let mut jets = Vec::with_capacity(entries.len());
        for e in entries {
            if e.point.as_slice() != e.jet.basepoint() {
                return Err(de::Error::custom(format!(
                    "jet basepoint {:?} differs from its point {:?}",
                    e.jet.basepoint(),
                    e.point
                )));
            }
            jets.push(e.jet);
        }
        WhitneyField::new(jets).map_err(de::Error::custom)
    }
}
