use std::sync::Arc;

use super::decomposition::WhitneyDecomposition;
use crate::calculus::{check_dim, AxisBox, JetOracle, ScaledBump};
use crate::error::Result;
use crate::jets::basis::{basis, Basis};
use crate::jets::Jet;

/// The partition of unity `θ_Q = φ_Q / Σ φ_{Q′}` subordinate to the dilates `1.1Q`,
/// with `φ_Q(x) = φ₀(2(x − c_Q)/(1.1 δ_Q))`.
#[derive(Clone, Debug)]
pub struct PartitionOfUnity {
    decomposition: Arc<WhitneyDecomposition>,
}

pub fn build_pou(decomposition: Arc<WhitneyDecomposition>) -> PartitionOfUnity {
    PartitionOfUnity { decomposition }
}

impl PartitionOfUnity {
    pub fn decomposition(&self) -> &Arc<WhitneyDecomposition> {
        &self.decomposition
    }

    /// The unnormalized bump `φ_Q`.
    pub fn bump(&self, q: usize) -> ScaledBump {
        let cube = &self.decomposition.cubes()[q];
        ScaledBump::new(cube.center(), 0.55 * cube.side()).expect("positive side")
    }

    /// Dense jets of `θ_Q` at `x` for every active cube.
    pub(crate) fn dense_thetas(
        &self,
        x: &[f64],
        order: usize,
    ) -> Result<(Arc<Basis>, Vec<(usize, Vec<f64>)>)> {
        let active = self.decomposition.active(x)?;
        let b = basis(x.len(), order);
        let mut total = vec![0.0; b.len()];
        let mut bumps = Vec::with_capacity(active.len());
        for q in active {
            let dense = self.bump(q).jet(x, order)?.to_dense(&b);
            for (t, v) in total.iter_mut().zip(&dense) {
                *t += v;
            }
            bumps.push((q, dense));
        }
        let inv = b.recip(&total);
        let thetas = bumps
            .into_iter()
            .map(|(q, phi)| (q, b.mul(&phi, &inv)))
            .collect();
        Ok((b, thetas))
    }

    /// Jets of `θ_Q` at `x` for every cube whose dilate `1.1Q` contains `x`.
    pub fn thetas(&self, x: &[f64], order: usize) -> Result<Vec<(usize, Jet)>> {
        let (b, thetas) = self.dense_thetas(x, order)?;
        Ok(thetas
            .into_iter()
            .map(|(q, d)| (q, Jet::from_dense(&b, x.to_vec(), &d)))
            .collect())
    }

    /// The jet of `θ_Q` at `x`; zero when `x ∉ 1.1Q`.
    pub fn theta(&self, q: usize, x: &[f64], order: usize) -> Result<Jet> {
        Ok(self
            .thetas(x, order)?
            .into_iter()
            .find(|(p, _)| *p == q)
            .map(|(_, j)| j)
            .unwrap_or_else(|| Jet::zero(x.to_vec(), order)))
    }

    pub fn theta_oracle(&self, q: usize) -> ThetaOracle {
        ThetaOracle {
            pou: self.clone(),
            q,
        }
    }
}

/// `θ_Q` as a [`JetOracle`] on the covered region.
#[derive(Clone, Debug)]
pub struct ThetaOracle {
    pou: PartitionOfUnity,
    q: usize,
}

impl JetOracle for ThetaOracle {
    fn dim(&self) -> usize {
        self.pou.decomposition.dim()
    }

    fn domain(&self) -> AxisBox {
        self.pou.decomposition.region().clone()
    }

    fn jet(&self, x: &[f64], order: usize) -> Result<Jet> {
        check_dim(self.dim(), x)?;
        self.pou.theta(self.q, x, order)
    }
}
