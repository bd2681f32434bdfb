use crate::error::{Error, Result};

/// Number of lattice points used by [`validate_velocity`].
pub const VALIDATION_POINTS: usize = 1000;

/// Monotone velocity law `V(w)`, `w >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum VelocityModel {
    Identity,
    Square,
    /// `w^two_m`, `two_m` even and positive.
    Power {
        two_m: u32,
    },
    Tabulated(TabulatedVelocity),
}

/// Piecewise-linear interpolant, constant beyond the first and last abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedVelocity {
    abscissae: Vec<f64>,
    ordinates: Vec<f64>,
    fd_step: f64,
}

impl TabulatedVelocity {
    /// Checks shape only; monotonicity is the job of [`validate_velocity`].
    pub fn new(abscissae: Vec<f64>, ordinates: Vec<f64>) -> Result<Self> {
        if abscissae.len() < 2 || abscissae.len() != ordinates.len() {
            return Err(Error::InvalidVelocity(format!(
                "need matching abscissae/ordinates with at least two points, got {}/{}",
                abscissae.len(),
                ordinates.len()
            )));
        }
        if abscissae.iter().chain(&ordinates).any(|v| !v.is_finite()) {
            return Err(Error::InvalidVelocity("non-finite table entry".into()));
        }
        if abscissae.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidVelocity(
                "abscissae must be strictly increasing".into(),
            ));
        }
        if abscissae[0] < 0.0 {
            return Err(Error::InvalidVelocity(
                "abscissae must be nonnegative".into(),
            ));
        }
        let scale = abscissae.last().unwrap().abs().max(1.0);
        Ok(Self {
            abscissae,
            ordinates,
            fd_step: 1e-6 * scale,
        })
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    fn eval(&self, w: f64) -> f64 {
        let xs = &self.abscissae;
        let ys = &self.ordinates;
        if w <= xs[0] {
            return ys[0];
        }
        if w >= xs[xs.len() - 1] {
            return ys[ys.len() - 1];
        }
        let k = xs.partition_point(|&x| x <= w) - 1;
        let t = (w - xs[k]) / (xs[k + 1] - xs[k]);
        ys[k] + t * (ys[k + 1] - ys[k])
    }

    fn derivative(&self, w: f64) -> f64 {
        let h = self.fd_step;
        (self.eval(w + h) - self.eval(w - h)) / (2.0 * h)
    }
}

impl VelocityModel {
    pub fn power(two_m: u32) -> Result<Self> {
        if two_m == 0 || !two_m.is_multiple_of(2) {
            return Err(Error::InvalidVelocity(format!(
                "power exponent must be even and positive, got {two_m}"
            )));
        }
        Ok(VelocityModel::Power { two_m })
    }

    /// Builds a tabulated law and rejects it unless it is monotone on its table.
    pub fn tabulated(abscissae: Vec<f64>, ordinates: Vec<f64>) -> Result<Self> {
        let range = *abscissae.last().unwrap_or(&0.0);
        let model = VelocityModel::Tabulated(TabulatedVelocity::new(abscissae, ordinates)?);
        validate_velocity(&model, range.max(0.0))?;
        Ok(model)
    }

    pub fn eval(&self, w: f64) -> f64 {
        match self {
            VelocityModel::Identity => w,
            VelocityModel::Square => w * w,
            VelocityModel::Power { two_m } => w.powi(*two_m as i32),
            VelocityModel::Tabulated(t) => t.eval(w),
        }
    }

    pub fn derivative(&self, w: f64) -> f64 {
        match self {
            VelocityModel::Identity => 1.0,
            VelocityModel::Square => 2.0 * w,
            VelocityModel::Power { two_m } => *two_m as f64 * w.powi(*two_m as i32 - 1),
            VelocityModel::Tabulated(t) => t.derivative(w),
        }
    }

    /// Short name used in configs and file names.
    pub fn name(&self) -> &'static str {
        match self {
            VelocityModel::Identity => "identity",
            VelocityModel::Square => "square",
            VelocityModel::Power { .. } => "power",
            VelocityModel::Tabulated(_) => "tabulated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub monotone: bool,
    pub lipschitz: f64,
    pub range_max: f64,
}

/// Samples `V` on `[0, range_max]` and checks that it never decreases.
pub fn validate_velocity(v: &VelocityModel, range_max: f64) -> Result<ValidationReport> {
    if !(range_max.is_finite() && range_max >= 0.0) {
        return Err(Error::InvalidVelocity(format!(
            "validation range must be nonnegative, got {range_max}"
        )));
    }
    let h = range_max / (VALIDATION_POINTS - 1) as f64;
    let ws: Vec<f64> = (0..VALIDATION_POINTS).map(|k| k as f64 * h).collect();
    let vs: Vec<f64> = ws.iter().map(|&w| v.eval(w)).collect();
    let scale = vs.iter().fold(1.0f64, |m, x| m.max(x.abs()));

    let mut lipschitz = ws
        .iter()
        .map(|&w| v.derivative(w).abs())
        .fold(0.0f64, f64::max);
    for k in 1..ws.len() {
        let drop = vs[k - 1] - vs[k];
        if drop > 1e-12 * scale {
            return Err(Error::NonMonotoneVelocity {
                w_lo: ws[k - 1],
                v_lo: vs[k - 1],
                w_hi: ws[k],
                v_hi: vs[k],
            });
        }
        if h > 0.0 {
            lipschitz = lipschitz.max((vs[k] - vs[k - 1]).abs() / h);
        }
    }
    Ok(ValidationReport {
        monotone: true,
        lipschitz,
        range_max,
    })
}
