//! Shape-field checkers, the Whitney-convexity fuzzer and the finiteness scan.

mod fuzz;
mod scan;
mod shape;
mod surrogate;

pub use fuzz::{
    combine_witness, fuzz_whitney_convexity, summarize, verify_witness, ConvexityWitness,
    FuzzSummary, MAX_REJECTIONS,
};
pub use scan::{finiteness_scan, k_sharp, FinitenessReport, ScanOptions, MAX_SCAN_POINTS};
pub use shape::{gamma_f_member, ShapeFieldSpec, VALUE_TOL};
pub use surrogate::{surrogate_local_norm, SurrogateOptions, SurrogateResult};
