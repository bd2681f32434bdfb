//! Finite-volume lab for the nonlocal conservation law
//! `q_t + (V(W[|q|]) q)_x = 0` with sign-changing data, its local entropy
//! limit `q_t + (V(|q|) q)_x = 0`, and the tools to compare them as the
//! kernel length shrinks.

pub mod analysis;
pub mod error;
pub mod harness;
pub mod local;
pub mod model;
pub mod nonlocal;
pub mod operator;
pub mod run;

pub use error::{Error, Result};
pub use local::{godunov_flux, run_local, FluxFunction, GodunovTable, ScalarFlux};
pub use model::{
    build_grid, sample_datum, CellField, Grid1D, InitialDatum, KernelSpec, SimConfig, VelocityModel,
};
pub use nonlocal::{nonlocal_step, run_nonlocal, NonlocalState};
pub use operator::{eval_w, eval_w_exponential, eval_w_tabulated, FaceField};
pub use run::{RunResult, Snapshot};
