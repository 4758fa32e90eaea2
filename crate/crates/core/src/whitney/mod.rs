//! Finite Whitney decomposition, partition of unity and the extension operator.

mod cube;
mod decomposition;
mod extension;
mod pou;
mod single;

pub use cube::DyadicCube;
pub use decomposition::{
    whitney_decompose, whitney_decompose_with, CubeRecord, DecomposeOptions, WhitneyDecomposition,
};
pub use extension::{extension_jet, whitney_extend, whitney_extend_with, Extension};
pub use pou::{build_pou, PartitionOfUnity, ThetaOracle};
pub use single::{single_jet_extend, SingleJetExtension};
