use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid initial datum: {0}")]
    InvalidDatum(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("velocity law is not monotone: V({w_hi}) = {v_hi} < V({w_lo}) = {v_lo}")]
    NonMonotoneVelocity {
        w_lo: f64,
        v_lo: f64,
        w_hi: f64,
        v_hi: f64,
    },

    #[error("invalid velocity law: {0}")]
    InvalidVelocity(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("kernel support {support_length} is shorter than the cell width {dx}")]
    KernelUnderResolved { support_length: f64, dx: f64 },

    #[error("CFL violation at step {step}: dt*max|v|/dx = {courant}")]
    CflViolation { step: usize, courant: f64 },

    #[error("invariant violated at step {step} (t = {time}): {what}")]
    InvariantViolation {
        step: usize,
        time: f64,
        what: String,
    },

    #[error("trajectory too coarse for the test function: retained gap {gap} > {limit}")]
    InsufficientTrajectoryResolution { gap: f64, limit: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("cell count {n_cells} is not divisible by {factor}")]
    IncompatibleFactor { n_cells: usize, factor: usize },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("config validation failed: {0}")]
    Validation(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvariantViolation { .. } | Error::CflViolation { .. } => 3,
            Error::Io { .. } => 4,
            _ => 2,
        }
    }
}
