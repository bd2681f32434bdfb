//! Domain types: mesh, fields, kernels, velocity laws, initial data and the
//! run configuration that ties them together.

mod config;
mod datum;
mod field;
mod grid;
mod kernel;
mod velocity;

pub use config::{SimConfig, DEFAULT_CFL, KAPPA_SLACK, MARGIN_CELLS};
pub use datum::{sample_datum, InitialDatum};
pub use field::CellField;
pub use grid::{build_grid, Grid1D};
pub use kernel::{KernelSpec, TabulatedKernel};
pub use velocity::{
    validate_velocity, TabulatedVelocity, ValidationReport, VelocityModel, VALIDATION_POINTS,
};
