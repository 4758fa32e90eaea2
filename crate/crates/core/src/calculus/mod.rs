//! Bump functions, jet oracles and the Faà di Bruno formula.

mod bump;
mod fdb;
mod oracle;
mod partitions;

pub use bump::{
    bump_derivatives, bump_g, cutoff_derivatives, phi0, BumpRational, MAX_BUMP_ORDER,
};
pub use fdb::{compose_jet, faa_di_bruno, power_jet, POWER_ZERO};
pub use oracle::{
    falling, scaled_bump, AxisBox, FlatTopCutoff, FnOracle, JetOracle, PolynomialOracle,
    PowerOracle, ProductOracle, RadialPower, ScaledBump, ScaledOracle, ZeroOracle,
};
pub(crate) use oracle::check_dim;
pub use partitions::{enumerate_partitions, Partition, PartitionSet};
