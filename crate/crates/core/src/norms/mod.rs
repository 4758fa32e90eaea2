//! Exact Whitney-field norms, sampled function norms, and the jet classes `Γ`.

mod field;
mod gamma;
mod sampled;

pub use field::{
    flat_ratio, whitney_field_cs_norm, whitney_field_flat_norm, whitney_field_norm,
    whitney_field_norm_parts, FieldNormParts,
};
pub use gamma::{
    flat_lengthscale, gamma_bound, gamma_member, jet_flat_ratio, lengthscale_constant, GammaSpec,
};
pub use sampled::{
    inf_float, prop_c2_bound_check, sampled_norms, sampled_norms_union, NormReport,
    SampleOptions, DEFAULT_MAX_PAIRS,
};
