use crate::error::{Error, Result};
use crate::jets::{first_duplicate, Jet, Smoothness, WhitneyField};

/// `(a^s / v^{s−m})^{1/m}` evaluated in log space, with `0/0 = 0` and `a/0 = ∞`.
///
/// `a` is `|∇^mP|`, `v ≥ 0` is the value; requires `m ≥ 1`.
pub fn flat_ratio(a: f64, v: f64, m: usize, s: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    if v == 0.0 {
        return f64::INFINITY;
    }
    let m = m as f64;
    ((s * a.ln() - (s - m) * v.ln()) / m).exp()
}

/// Largest flat ratio over `1 ≤ m ≤ ⌊s⌋` given `|∇^mP|` for `m = 0..`.
pub(crate) fn flat_ratio_max(value: f64, order_norms: &[f64], s: Smoothness) -> f64 {
    (1..=s.floor())
        .map(|m| flat_ratio(order_norms[m], value, m, s.s()))
        .fold(0.0, f64::max)
}

fn check_nonnegative(jet: &Jet) -> Result<f64> {
    let v = jet.value();
    if v < 0.0 {
        return Err(Error::NotNonnegative {
            point: jet.basepoint().to_vec(),
            value: v,
        });
    }
    Ok(v)
}

fn check_field(field: &WhitneyField, s: Smoothness) -> Result<()> {
    if field.degree() != s.floor() {
        return Err(Error::InvalidArgument(format!(
            "field degree {} does not match ⌊s⌋ = {}",
            field.degree(),
            s.floor()
        )));
    }
    if let Some(p) = first_duplicate(field.jets().iter().map(|j| j.basepoint())) {
        return Err(Error::DuplicatePoint(p.to_vec()));
    }
    Ok(())
}

/// The three suprema that make up the Whitney-field norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldNormParts {
    /// `sup_x max_m |∇^mP_x(x)|`.
    pub sup: f64,
    /// `sup_{x≠y} max_m |∇^m(P_x − P_y)(y)| / |x − y|^{s−m}`.
    pub pair: f64,
    /// `sup_x max_{m≥1} (|∇^mP_x(x)|^s / P_x(x)^{s−m})^{1/m}`.
    pub flat: f64,
}

impl FieldNormParts {
    pub fn cs(&self) -> f64 {
        self.sup + self.pair
    }

    /// `sup + pair + flat`.
    pub fn total(&self) -> f64 {
        self.sup + self.pair + self.flat
    }

    /// `max(sup, pair, flat)`, within a factor 3 of [`FieldNormParts::total`].
    pub fn max_form(&self) -> f64 {
        self.sup.max(self.pair).max(self.flat)
    }
}

pub(crate) fn pair_term(px: &Jet, py: &Jet, s: Smoothness) -> Result<f64> {
    let y = py.basepoint();
    let dist: f64 = px
        .basepoint()
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    if dist == 0.0 {
        return Err(Error::DuplicatePoint(y.to_vec()));
    }
    let diff = px.recenter(y).sub(py)?;
    let norms = diff.order_norms();
    Ok(norms
        .iter()
        .enumerate()
        .map(|(m, a)| a / dist.powf(s.s() - m as f64))
        .fold(0.0, f64::max))
}

/// Exact parts of the Whitney-field norm.
pub fn whitney_field_norm_parts(field: &WhitneyField, s: Smoothness) -> Result<FieldNormParts> {
    check_field(field, s)?;
    let jets = field.jets();
    let mut sup = 0.0f64;
    let mut flat = 0.0f64;
    for jet in jets {
        let norms = jet.order_norms();
        sup = norms.iter().fold(sup, |a, &b| a.max(b));
        let v = check_nonnegative(jet)?;
        flat = flat.max(flat_ratio_max(v, &norms, s));
    }
    let mut pair = 0.0f64;
    for (i, px) in jets.iter().enumerate() {
        for (j, py) in jets.iter().enumerate() {
            if i != j {
                pair = pair.max(pair_term(px, py, s)?);
            }
        }
    }
    Ok(FieldNormParts { sup, pair, flat })
}

/// The `C^s` part of the Whitney-field norm: sup term plus pair term.
pub fn whitney_field_cs_norm(field: &WhitneyField, s: Smoothness) -> Result<f64> {
    check_field(field, s)?;
    let jets = field.jets();
    let sup = jets
        .iter()
        .flat_map(|j| j.order_norms())
        .fold(0.0, f64::max);
    let mut pair = 0.0f64;
    for (i, px) in jets.iter().enumerate() {
        for (j, py) in jets.iter().enumerate() {
            if i != j {
                pair = pair.max(pair_term(px, py, s)?);
            }
        }
    }
    Ok(sup + pair)
}

/// The flatness part of the Whitney-field norm; `+∞` when some jet has a
/// nonzero derivative where its value vanishes.
pub fn whitney_field_flat_norm(field: &WhitneyField, s: Smoothness) -> Result<f64> {
    check_field(field, s)?;
    let mut flat = 0.0f64;
    for jet in field.jets() {
        let v = check_nonnegative(jet)?;
        flat = flat.max(flat_ratio_max(v, &jet.order_norms(), s));
    }
    Ok(flat)
}

/// The full Whitney-field norm, `cs + flat`.
pub fn whitney_field_norm(field: &WhitneyField, s: Smoothness) -> Result<f64> {
    Ok(whitney_field_norm_parts(field, s)?.total())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(jets: Vec<Jet>) -> WhitneyField {
        WhitneyField::new(jets).unwrap()
    }

    #[test]
    fn cs_examples() {
        let s = Smoothness::new(2.0).unwrap();
        let single = field(vec![Jet::constant(vec![0.3], 1, 1.0)]);
        assert_eq!(whitney_field_cs_norm(&single, s).unwrap(), 1.0);
        let two = field(vec![Jet::zero(vec![0.0], 1), Jet::constant(vec![1.0], 1, 1.0)]);
        assert_eq!(whitney_field_cs_norm(&two, s).unwrap(), 2.0);
    }

    #[test]
    fn flat_examples() {
        let s2 = Smoothness::new(2.0).unwrap();
        let p = Jet::from_slices(&[0.0], 1, &[(&[0], 1.0), (&[1], 1.0)]).unwrap();
        assert_eq!(whitney_field_flat_norm(&field(vec![p.clone()]), s2).unwrap(), 1.0);
        let q = Jet::from_slices(&[0.0], 1, &[(&[1], 1.0)]).unwrap();
        assert_eq!(whitney_field_flat_norm(&field(vec![q]), s2).unwrap(), f64::INFINITY);
        let s1 = Smoothness::new(0.8).unwrap();
        let c = Jet::constant(vec![0.0], 0, 2.0);
        assert_eq!(whitney_field_flat_norm(&field(vec![c]), s1).unwrap(), 0.0);
        let neg = Jet::constant(vec![0.0], 1, -1.0);
        assert!(matches!(
            whitney_field_flat_norm(&field(vec![neg]), s2),
            Err(Error::NotNonnegative { .. })
        ));
    }

    #[test]
    fn degree_must_match() {
        let s = Smoothness::new(3.0).unwrap();
        let f = field(vec![Jet::constant(vec![0.0], 1, 1.0)]);
        assert!(whitney_field_cs_norm(&f, s).is_err());
    }

    #[test]
    fn flat_ratio_conventions() {
        assert_eq!(flat_ratio(0.0, 0.0, 1, 2.0), 0.0);
        assert_eq!(flat_ratio(1.0, 0.0, 1, 2.0), f64::INFINITY);
        // (|2x|² / x²)^1 = 4
        assert!((flat_ratio(2.0 * 0.3, 0.09, 1, 2.0) - 4.0).abs() < 1e-12);
    }
}
