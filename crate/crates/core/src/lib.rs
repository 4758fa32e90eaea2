//! Whitney extension of nonnegative flat jet data.
//!
//! The crate covers the jet algebra ([`jets`]), bump functions, oracles and the
//! multivariate Faà di Bruno formula ([`calculus`]), exact and sampled
//! Hölder and flatness norms ([`norms`]), the finite Whitney extension
//! operator ([`whitney`]) and finiteness-principle experiments ([`finiteness`]).

pub mod calculus;
pub mod error;
pub mod finiteness;
pub mod instance;
pub mod jets;
pub mod norms;
pub mod whitney;

pub use error::{Error, Result};
pub use jets::{Jet, MultiIndex, Smoothness, WhitneyField};
