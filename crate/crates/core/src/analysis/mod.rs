//! Norms, total variation, coarsening and the entropy functional.

mod entropy;
mod norms;

pub use entropy::{
    adaptive_simpson, bump_lattice, entropy_functional, entropy_min, EntropyPair, TestBump,
    BETA_TOL, DEFAULT_KRUZKOV_DELTA,
};
pub use norms::{coarsen, l1_distance, total_variation, Window};
