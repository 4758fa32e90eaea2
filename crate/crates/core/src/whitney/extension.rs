use std::sync::Arc;

use super::decomposition::{whitney_decompose_with, DecomposeOptions, WhitneyDecomposition};
use super::pou::{build_pou, PartitionOfUnity};
use super::single::{single_jet_extend, SingleJetExtension};
use crate::calculus::{check_dim, AxisBox, JetOracle};
use crate::error::{Error, Result};
use crate::jets::{Jet, Smoothness, WhitneyField};
use crate::norms::{whitney_field_norm_parts, FieldNormParts};

/// The extension `F = Σ_Q θ_Q · 𝒯_{x_Q}[P_{x_Q}]` of a Whitney field.
#[derive(Clone, Debug)]
pub struct Extension {
    field: WhitneyField,
    s: Smoothness,
    pou: PartitionOfUnity,
    locals: Vec<SingleJetExtension>,
    norm: FieldNormParts,
}

pub fn whitney_extend(field: &WhitneyField, s: Smoothness, bound_box: &AxisBox) -> Result<Extension> {
    whitney_extend_with(field, s, bound_box, DecomposeOptions::default())
}

pub fn whitney_extend_with(
    field: &WhitneyField,
    s: Smoothness,
    bound_box: &AxisBox,
    options: DecomposeOptions,
) -> Result<Extension> {
    let norm = whitney_field_norm_parts(field, s)?;
    if norm.flat.is_infinite() {
        let bad = field
            .jets()
            .iter()
            .find(|j| j.value() == 0.0 && !j.is_zero())
            .expect("infinite flat norm comes from a non-flat zero");
        let order = bad.coeffs().keys().map(|a| a.order()).find(|&o| o > 0).unwrap_or(0);
        return Err(Error::NotFlat {
            point: bad.basepoint().to_vec(),
            order,
        });
    }
    if !norm.pair.is_finite() {
        return Err(Error::InvalidArgument("field pair norm overflows".into()));
    }
    let decomposition = whitney_decompose_with(&field.points(), bound_box, options)?;
    let locals = field
        .jets()
        .iter()
        .map(|j| single_jet_extend(j, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(Extension {
        field: field.clone(),
        s,
        pou: build_pou(Arc::new(decomposition)),
        locals,
        norm,
    })
}

impl Extension {
    pub fn field(&self) -> &WhitneyField {
        &self.field
    }

    pub fn smoothness(&self) -> Smoothness {
        self.s
    }

    pub fn decomposition(&self) -> &WhitneyDecomposition {
        self.pou.decomposition()
    }

    pub fn pou(&self) -> &PartitionOfUnity {
        &self.pou
    }

    /// Local extension around the `i`-th point of the field.
    pub fn local(&self, i: usize) -> &SingleJetExtension {
        &self.locals[i]
    }

    /// Exact parts of the input field's norm.
    pub fn field_norm(&self) -> FieldNormParts {
        self.norm
    }

    /// Largest coefficient error `|𝒥_xF − P_x|` over the points of the field.
    pub fn jet_match_error(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for p in self.field.jets() {
            let got = self.jet(p.basepoint(), p.degree())?;
            worst = worst.max(got.max_coeff_diff(p)?);
        }
        Ok(worst)
    }
}

/// The jet of the extension at `x`, via the Leibniz rule over the active cubes.
pub fn extension_jet(ext: &Extension, x: &[f64], order: usize) -> Result<Jet> {
    ext.jet(x, order)
}

impl JetOracle for Extension {
    fn dim(&self) -> usize {
        self.field.dim()
    }

    fn domain(&self) -> AxisBox {
        self.decomposition().region().clone()
    }

    fn jet(&self, x: &[f64], order: usize) -> Result<Jet> {
        check_dim(self.dim(), x)?;
        let decomposition = self.pou.decomposition();
        let active = decomposition.active(x)?;
        let contributes = |q: &usize| {
            decomposition
                .rep(*q)
                .is_some_and(|i| !self.locals[i].vanishes_at(x))
        };
        if !active.iter().any(contributes) {
            return Ok(Jet::zero(x.to_vec(), order));
        }
        let (b, thetas) = self.pou.dense_thetas(x, order)?;
        let mut total = vec![0.0; b.len()];
        for (q, theta) in &thetas {
            if !contributes(q) {
                continue;
            }
            let i = decomposition.rep(*q).expect("contributing cube has a representative");
            let local = self.locals[i].jet(x, order)?.to_dense(&b);
            b.mul_add_into(&mut total, theta, &local);
        }
        Ok(Jet::from_dense(&b, x.to_vec(), &total))
    }
}
