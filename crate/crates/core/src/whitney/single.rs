use crate::calculus::{check_dim, AxisBox, FlatTopCutoff, JetOracle};
use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::jets::Smoothness;
use crate::norms::{gamma_bound, lengthscale_constant};

/// Relative deviation allowed for the jet inside the cutoff support.
const LOCAL_EPS: f64 = 0.5;

/// A nonnegative function with prescribed jet at one point: `χ((x − x₀)/r) · P(x)`.
///
/// `χ` is a flat-top cutoff equal to 1 to infinite order at the origin, so
/// the jet at `x₀` is exactly `P`. The radius `r = c₀ (P(x₀)/M)^{1/s} / √n`
/// with `M` the minimal Γ bound keeps the support cube inside the ball on
/// which `P ≥ P(x₀)/2`.
#[derive(Clone, Debug)]
pub struct SingleJetExtension {
    jet: Jet,
    cutoff: Option<FlatTopCutoff>,
    bound: f64,
}

pub fn single_jet_extend(jet: &Jet, s: Smoothness) -> Result<SingleJetExtension> {
    if jet.degree() != s.floor() {
        return Err(Error::InvalidArgument(format!(
            "jet degree {} does not match ⌊s⌋ = {}",
            jet.degree(),
            s.floor()
        )));
    }
    let m = gamma_bound(jet, s)?;
    if m.is_infinite() {
        let order = jet
            .coeffs()
            .keys()
            .map(|a| a.order())
            .find(|&o| o > 0)
            .unwrap_or(0);
        return Err(Error::NotFlat {
            point: jet.basepoint().to_vec(),
            order,
        });
    }
    if jet.is_zero() {
        return Ok(SingleJetExtension {
            jet: jet.clone(),
            cutoff: None,
            bound: 0.0,
        });
    }
    let n = jet.dim();
    let delta = (jet.value() / m).powf(1.0 / s.s()).min(1.0);
    let radius = lengthscale_constant(n, s, LOCAL_EPS) * delta / (n as f64).sqrt();
    Ok(SingleJetExtension {
        jet: jet.clone(),
        cutoff: Some(FlatTopCutoff::new(jet.basepoint().to_vec(), radius)?),
        bound: m,
    })
}

impl SingleJetExtension {
    pub fn jet_data(&self) -> &Jet {
        &self.jet
    }

    /// The Γ bound `M` used for the scaling.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Closed support box; `None` for the zero function.
    pub fn support(&self) -> Option<AxisBox> {
        self.cutoff.as_ref().map(|c| c.support())
    }

    pub fn is_zero(&self) -> bool {
        self.cutoff.is_none()
    }

    pub(crate) fn vanishes_at(&self, x: &[f64]) -> bool {
        match &self.cutoff {
            None => true,
            Some(c) => {
                let r = c.radius();
                x.iter()
                    .zip(self.jet.basepoint())
                    .any(|(a, b)| (a - b).abs() >= r)
            }
        }
    }
}

impl JetOracle for SingleJetExtension {
    fn dim(&self) -> usize {
        self.jet.dim()
    }

    fn jet(&self, x: &[f64], order: usize) -> Result<Jet> {
        check_dim(self.dim(), x)?;
        let cutoff = match &self.cutoff {
            Some(c) if !self.vanishes_at(x) => c,
            _ => return Ok(Jet::zero(x.to_vec(), order)),
        };
        let chi = cutoff.jet(x, order)?;
        chi.multiply(&self.jet.recenter(x).with_degree(order))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::MultiIndex;

    #[test]
    fn zero_and_constant() {
        let s = Smoothness::new(2.0).unwrap();
        let z = single_jet_extend(&Jet::zero(vec![0.0], 1), s).unwrap();
        assert!(z.is_zero());
        assert!(z.jet(&[0.0], 1).unwrap().is_zero());
        let c = Jet::constant(vec![0.5], 1, 2.0);
        let e = single_jet_extend(&c, s).unwrap();
        assert_eq!(e.jet(&[0.5], 1).unwrap(), c);
        assert!((e.support().unwrap().hi[0] - 0.5 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn reproduces_affine_jet() {
        let s = Smoothness::new(2.0).unwrap();
        let p = Jet::from_slices(&[0.0], 1, &[(&[0], 1.0), (&[1], 1.0)]).unwrap();
        let e = single_jet_extend(&p, s).unwrap();
        assert_eq!(e.jet(&[0.0], 1).unwrap(), p);
        for i in 0..=400 {
            let x = -1.0 + 2.0 * i as f64 / 400.0;
            assert!(e.value(&[x]).unwrap() >= 0.0);
        }
    }

    #[test]
    fn rejects_non_flat() {
        let s = Smoothness::new(2.0).unwrap();
        let p = Jet::new(vec![0.0], 1, [(MultiIndex::new(&[1]), 1.0)]).unwrap();
        assert!(matches!(single_jet_extend(&p, s), Err(Error::NotFlat { .. })));
    }
}
