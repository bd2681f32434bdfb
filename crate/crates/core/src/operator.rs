//! The nonlocal operator `W[|q|, γ](x) = ∫_{-∞}^{x} γ(y - x) |q(y)| dy`
//! evaluated at every cell face of a piecewise-constant field.
//!
//! The field is extended by zero to the left of the domain. For the
//! exponential kernel the face values obey an exact first-order recurrence;
//! tabulated kernels are integrated exactly against the piecewise-linear
//! kernel interpolant.

use crate::error::{Error, Result};
use crate::model::{CellField, Grid1D, KernelSpec, TabulatedKernel};

/// Values on the `n_cells + 1` faces of a grid. Face `j` is the left edge of
/// cell `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceField {
    grid: Grid1D,
    values: Vec<f64>,
}

impl FaceField {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_faces() {
            return Err(Error::InvalidDatum(format!(
                "face field has {} values for {} faces",
                values.len(),
                grid.n_faces()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    /// Cell field pairing cell `i` with its right face `i + 1`.
    pub fn right_face_cells(&self) -> CellField {
        CellField::from_raw(self.grid, self.values[1..].to_vec())
    }
}

/// Exact recurrence for `γ(s) = exp(s/eta)/eta`:
/// `W_{i+1} = e^{-dx/eta} W_i + (1 - e^{-dx/eta}) |q_i|`, `W_0 = 0`.
pub fn eval_w_exponential(q: &CellField, eta: f64) -> FaceField {
    let grid = *q.grid();
    let decay = (-grid.dx() / eta).exp();
    let gain = -(-grid.dx() / eta).exp_m1();
    let mut values = Vec::with_capacity(grid.n_faces());
    let mut w = 0.0;
    values.push(w);
    for &qi in q.values() {
        w = decay * w + gain * qi.abs();
        values.push(w);
    }
    FaceField { grid, values }
}

/// Exact integration of `|q|` against the piecewise-linear tabulated kernel.
pub fn eval_w_tabulated(q: &CellField, kernel: &TabulatedKernel) -> Result<FaceField> {
    let grid = *q.grid();
    let dx = grid.dx();
    let support = kernel.support_length();
    if support < dx {
        return Err(Error::KernelUnderResolved {
            support_length: support,
            dx,
        });
    }
    // cells whose left edge lies within `reach` cells of the face contribute
    let reach = (support / dx).ceil() as usize + 1;
    let abs: Vec<f64> = q.values().iter().map(|v| v.abs()).collect();
    let mut values = Vec::with_capacity(grid.n_faces());
    for j in 0..grid.n_faces() {
        let first = j.saturating_sub(reach);
        let mut w = 0.0;
        for (i, &a) in abs.iter().enumerate().take(j).skip(first) {
            if a == 0.0 {
                continue;
            }
            let lo = (i as f64 - j as f64) * dx;
            let hi = (i as f64 + 1.0 - j as f64) * dx;
            w += a * (kernel.antiderivative(hi) - kernel.antiderivative(lo));
        }
        values.push(w);
    }
    Ok(FaceField { grid, values })
}

/// Dispatches on the kernel variant.
pub fn eval_w(q: &CellField, kernel: &KernelSpec) -> Result<FaceField> {
    match kernel {
        KernelSpec::Exponential { eta } => Ok(eval_w_exponential(q, *eta)),
        KernelSpec::TabulatedBV(k) => eval_w_tabulated(q, k),
    }
}

/// Residual of `∂x W = (|q| - W)/eta` on the grid: the maximum over cells of
/// `|(W_{i+1} - W_i)/dx - (|q_i| - W_{i+1})/eta|`, pairing each cell with its
/// right face.
pub fn check_identity(q: &CellField, w: &FaceField, eta: f64) -> f64 {
    let dx = q.grid().dx();
    q.values()
        .iter()
        .zip(w.values().windows(2))
        .map(|(qi, wf)| ((wf[1] - wf[0]) / dx - (qi.abs() - wf[1]) / eta).abs())
        .fold(0.0, f64::max)
}

/// `Σ_i |W_{i+1} - |q_i|| dx`, the static distance between the operator and `|q|`.
pub fn operator_l1_gap(q: &CellField, w: &FaceField) -> f64 {
    q.values()
        .iter()
        .zip(&w.values()[1..])
        .map(|(qi, wi)| (wi - qi.abs()).abs())
        .sum::<f64>()
        * q.grid().dx()
}
