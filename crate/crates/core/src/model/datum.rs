use crate::error::{Error, Result};
use crate::model::{CellField, Grid1D};

/// Compactly supported piecewise-constant initial datum.
///
/// Plateau `k` holds `values[k]` on `(breakpoints[k], breakpoints[k + 1])`;
/// the datum is zero outside `[breakpoints[0], breakpoints[last]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialDatum {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl InitialDatum {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidDatum("need at least two breakpoints".into()));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidDatum(format!(
                "{} breakpoints need {} plateau values, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                values.len()
            )));
        }
        if breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidDatum("non-finite entry".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDatum(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    /// `value` on `(a, b)`, zero elsewhere.
    pub fn indicator(a: f64, b: f64, value: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![value])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    /// Pointwise value; breakpoints belong to the plateau on their right.
    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x >= hi {
            return 0.0;
        }
        let k = self.breakpoints.partition_point(|&b| b <= x) - 1;
        self.values[k]
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sum of absolute jumps, including the jumps to zero at both ends.
    pub fn total_variation(&self) -> f64 {
        let first = self.values[0].abs();
        let last = self.values.last().unwrap().abs();
        first
            + last
            + self
                .values
                .windows(2)
                .map(|w| (w[1] - w[0]).abs())
                .sum::<f64>()
    }

    pub fn integral(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(b, v)| v * (b[1] - b[0]))
            .sum()
    }

    /// Exact average of the datum over `[a, b]`.
    pub fn average_over(&self, a: f64, b: f64) -> f64 {
        let mut acc = 0.0;
        for (w, v) in self.breakpoints.windows(2).zip(&self.values) {
            let lo = w[0].max(a);
            let hi = w[1].min(b);
            if hi > lo {
                acc += v * (hi - lo);
            }
        }
        acc / (b - a)
    }
}

/// Cell averages of `datum` on `grid`.
pub fn sample_datum(datum: &InitialDatum, grid: &Grid1D) -> CellField {
    let values = (0..grid.n_cells())
        .map(|i| datum.average_over(grid.face(i), grid.face(i + 1)))
        .collect();
    CellField::from_raw(*grid, values)
}
