use crate::error::{Error, Result};
use crate::model::{Grid1D, InitialDatum, KernelSpec, VelocityModel};

/// Inflation allowed on `‖q₀‖∞` for kernels without a strict maximum principle.
pub const KAPPA_SLACK: f64 = 0.05;

/// Minimum padding, in cells, between the reachable support and the boundary.
pub const MARGIN_CELLS: f64 = 5.0;

pub const DEFAULT_CFL: f64 = 0.5;

/// Everything needed for one run. Validated on construction and on every
/// `with_*` update; a local run simply has no kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    grid: Grid1D,
    datum: InitialDatum,
    kernel: Option<KernelSpec>,
    velocity: VelocityModel,
    t_end: f64,
    cfl: f64,
    snapshot_times: Vec<f64>,
    snapshot_stride: usize,
}

impl SimConfig {
    pub fn new(
        grid: Grid1D,
        datum: InitialDatum,
        kernel: Option<KernelSpec>,
        velocity: VelocityModel,
        t_end: f64,
    ) -> Result<Self> {
        let cfg = Self {
            grid,
            datum,
            kernel,
            velocity,
            t_end,
            cfl: DEFAULT_CFL,
            snapshot_times: vec![t_end],
            snapshot_stride: 1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_cfl(mut self, cfl: f64) -> Result<Self> {
        self.cfl = cfl;
        self.validate()?;
        Ok(self)
    }

    pub fn with_snapshot_times(mut self, times: Vec<f64>) -> Result<Self> {
        self.snapshot_times = times;
        self.validate()?;
        Ok(self)
    }

    pub fn with_snapshot_stride(mut self, stride: usize) -> Result<Self> {
        self.snapshot_stride = stride;
        self.validate()?;
        Ok(self)
    }

    pub fn with_kernel(mut self, kernel: Option<KernelSpec>) -> Result<Self> {
        self.kernel = kernel;
        self.validate()?;
        Ok(self)
    }

    pub fn with_grid(mut self, grid: Grid1D) -> Result<Self> {
        self.grid = grid;
        self.validate()?;
        Ok(self)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn datum(&self) -> &InitialDatum {
        &self.datum
    }

    pub fn kernel(&self) -> Option<&KernelSpec> {
        self.kernel.as_ref()
    }

    pub fn velocity(&self) -> &VelocityModel {
        &self.velocity
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn cfl(&self) -> f64 {
        self.cfl
    }

    pub fn snapshot_times(&self) -> &[f64] {
        &self.snapshot_times
    }

    pub fn snapshot_stride(&self) -> usize {
        self.snapshot_stride
    }

    /// Bound on `‖q(t)‖∞` used for flux validation and padding.
    pub fn reachable_bound(&self) -> f64 {
        let m = self.datum.linf_norm();
        match self.kernel {
            Some(KernelSpec::TabulatedBV(_)) => (1.0 + KAPPA_SLACK) * m,
            _ => m,
        }
    }

    /// Largest rightward and leftward signal speeds over the reachable range,
    /// inflated by `1 + KAPPA_SLACK`. Covers both `V` (nonlocal transport) and
    /// `f'(u) = V(|u|) + |u| V'(|u|)` (local characteristics).
    pub fn signal_speeds(&self) -> (f64, f64) {
        let m = self.reachable_bound();
        let n = 1000;
        let mut right = 0.0f64;
        let mut left = 0.0f64;
        for k in 0..n {
            let w = m * k as f64 / (n - 1) as f64;
            let v = self.velocity.eval(w);
            let fp = v + w * self.velocity.derivative(w);
            for s in [v, fp] {
                right = right.max(s);
                left = left.max(-s);
            }
        }
        (right * (1.0 + KAPPA_SLACK), left * (1.0 + KAPPA_SLACK))
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "t_end must be nonnegative, got {}",
                self.t_end
            )));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidConfig(
                "snapshot_stride must be positive".into(),
            ));
        }
        if self.snapshot_times.is_empty() {
            return Err(Error::InvalidConfig(
                "need at least one snapshot time".into(),
            ));
        }
        if self
            .snapshot_times
            .iter()
            .any(|t| !(t.is_finite() && *t >= 0.0 && *t <= self.t_end))
        {
            return Err(Error::InvalidConfig(format!(
                "snapshot times must lie in [0, {}]",
                self.t_end
            )));
        }
        if self.snapshot_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "snapshot times must be strictly increasing".into(),
            ));
        }
        if let Some(KernelSpec::TabulatedBV(k)) = &self.kernel {
            if k.support_length() < self.grid.dx() {
                return Err(Error::KernelUnderResolved {
                    support_length: k.support_length(),
                    dx: self.grid.dx(),
                });
            }
        }

        let (lo, hi) = self.datum.support();
        let margin = MARGIN_CELLS * self.grid.dx();
        let (right, left) = self.signal_speeds();
        let need_lo = lo - self.t_end * left - margin;
        let need_hi = hi + self.t_end * right + margin;
        if self.grid.x_min() > need_lo + 1e-12 || self.grid.x_max() < need_hi - 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "domain [{}, {}] must contain [{need_lo}, {need_hi}] so no wave reaches the boundary",
                self.grid.x_min(),
                self.grid.x_max()
            )));
        }
        Ok(())
    }
}
