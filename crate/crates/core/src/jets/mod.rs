//! Multi-indices, jets and Whitney fields.

pub(crate) mod basis;
mod field;
mod jet;
mod multiindex;

pub use field::WhitneyField;
pub(crate) use field::first_duplicate;
pub use jet::Jet;
pub use multiindex::{
    binomial, enumerate_multiindices, factorial, monomial_count, multiindices_of_order,
    MultiIndex,
};

use crate::error::{Error, Result};

/// A smoothness exponent `s > 0` split as `s = ⌊s⌋ + σ` with `σ ∈ (0, 1]`.
///
/// `⌊s⌋` is the largest integer strictly below `s`, so `⌊2⌋ = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Smoothness {
    s: f64,
    floor: usize,
}

impl Smoothness {
    pub fn new(s: f64) -> Result<Smoothness> {
        if !s.is_finite() || s <= 0.0 || s > 64.0 {
            return Err(Error::InvalidSmoothness(s));
        }
        let floor = (s.ceil() as usize) - 1;
        Ok(Smoothness { s, floor })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Jet degree `⌊s⌋`.
    pub fn floor(&self) -> usize {
        self.floor
    }

    pub fn sigma(&self) -> f64 {
        self.s - self.floor as f64
    }
}
