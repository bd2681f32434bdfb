use crate::error::{Error, Result};
use crate::model::{CellField, Grid1D};

/// Closed interval `[lo, hi]` of the space axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Validation(format!("invalid window [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn whole(grid: &Grid1D) -> Self {
        Self {
            lo: grid.x_min(),
            hi: grid.x_max(),
        }
    }

    fn check_inside(&self, grid: &Grid1D) -> Result<()> {
        if self.lo < grid.x_min() || self.hi > grid.x_max() {
            return Err(Error::Validation(format!(
                "window [{}, {}] leaves the domain [{}, {}]",
                self.lo,
                self.hi,
                grid.x_min(),
                grid.x_max()
            )));
        }
        Ok(())
    }

    /// Length of `[a, b] ∩ window`.
    pub fn overlap(&self, a: f64, b: f64) -> f64 {
        (b.min(self.hi) - a.max(self.lo)).max(0.0)
    }
}

/// `Σ |a_i - b_i| · |cell_i ∩ window|`.
pub fn l1_distance(a: &CellField, b: &CellField, window: Window) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = a.grid();
    window.check_inside(grid)?;
    Ok(a.values()
        .iter()
        .zip(b.values())
        .enumerate()
        .map(|(i, (x, y))| (x - y).abs() * window.overlap(grid.face(i), grid.face(i + 1)))
        .sum())
}

/// `Σ |a_{i+1} - a_i|`.
pub fn total_variation(a: &CellField) -> f64 {
    a.values().windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Block averages of `factor` consecutive cells.
pub fn coarsen(fine: &CellField, factor: usize) -> Result<CellField> {
    let n = fine.grid().n_cells();
    if factor == 0 || !n.is_multiple_of(factor) {
        return Err(Error::IncompatibleFactor { n_cells: n, factor });
    }
    if factor == 1 {
        return Ok(fine.clone());
    }
    let g = fine.grid();
    let coarse = Grid1D::new(g.x_min(), g.x_max(), n / factor)?;
    let values = fine
        .values()
        .chunks(factor)
        .map(|c| c.iter().sum::<f64>() / factor as f64)
        .collect();
    CellField::new(coarse, values)
}
