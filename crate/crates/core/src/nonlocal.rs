//! Conservative upwind finite-volume scheme for
//! `∂t q + ∂x(V(W[|q|, γ]) q) = 0` with face velocities `V(W_{i+1/2})`.

use crate::error::{Error, Result};
use crate::model::{
    sample_datum, validate_velocity, CellField, KernelSpec, SimConfig, VelocityModel, KAPPA_SLACK,
};
use crate::operator::{eval_w, FaceField};
use crate::run::{march, FluxScheme, Guards, RunResult, MIN_SPEED};

#[derive(Debug, Clone, PartialEq)]
pub struct NonlocalState {
    pub time: f64,
    pub q: CellField,
    pub w: FaceField,
    pub step_index: usize,
}

impl NonlocalState {
    pub fn initial(config: &SimConfig) -> Result<Self> {
        let kernel = require_kernel(config)?;
        let q = sample_datum(config.datum(), config.grid());
        let w = eval_w(&q, kernel)?;
        Ok(Self {
            time: 0.0,
            q,
            w,
            step_index: 0,
        })
    }
}

fn require_kernel(config: &SimConfig) -> Result<&KernelSpec> {
    config
        .kernel()
        .ok_or_else(|| Error::InvalidConfig("nonlocal run needs a kernel".into()))
}

/// Upwind fluxes from the face operator values `w`; returns `max |V(W)|`.
pub(crate) fn upwind_fluxes(
    q: &[f64],
    w: &[f64],
    velocity: &VelocityModel,
    flux: &mut [f64],
) -> f64 {
    let n = q.len();
    let mut speed = 0.0f64;
    for (j, (f, &wj)) in flux.iter_mut().zip(w).enumerate() {
        let v = velocity.eval(wj);
        speed = speed.max(v.abs());
        let upwind = if v >= 0.0 {
            if j == 0 {
                0.0
            } else {
                q[j - 1]
            }
        } else if j == n {
            0.0
        } else {
            q[j]
        };
        *f = v * upwind;
    }
    speed
}

/// Bound on `|W_{i+1/2} - W_{i-1/2}| / ‖q‖∞` over one cell.
fn face_gain(kernel: &KernelSpec, dx: f64) -> f64 {
    match kernel {
        KernelSpec::Exponential { eta } => -(-dx / eta).exp_m1(),
        KernelSpec::TabulatedBV(k) => (dx * k.total_variation()).min(1.0),
    }
}

/// The step must satisfy `dt/dx · (max|V(W)| + gain · Lip(V) · ‖q‖∞) <= 1`.
/// The second term covers the velocity jump across a cell: the update is
/// `q_i(1 - λV₊) + λV₋q_{i-1}` and its weights only sum to one when
/// `V₊ = V₋`.
#[derive(Debug, Clone, Copy)]
struct StepRule {
    gain: f64,
    lipschitz: f64,
}

impl StepRule {
    fn new(config: &SimConfig, kernel: &KernelSpec) -> Result<Self> {
        let report = validate_velocity(config.velocity(), config.reachable_bound())?;
        Ok(Self {
            gain: face_gain(kernel, config.grid().dx()),
            lipschitz: report.lipschitz,
        })
    }

    fn speed(&self, max_v: f64, linf: f64) -> f64 {
        max_v + self.gain * self.lipschitz * linf
    }
}

struct NonlocalScheme<'a> {
    kernel: &'a KernelSpec,
    velocity: &'a VelocityModel,
    rule: StepRule,
}

impl FluxScheme for NonlocalScheme<'_> {
    fn fluxes(&mut self, q: &CellField, flux: &mut [f64]) -> Result<f64> {
        let w = eval_w(q, self.kernel)?;
        let max_v = upwind_fluxes(q.values(), w.values(), self.velocity, flux);
        Ok(self.rule.speed(max_v, q.linf_norm()))
    }

    fn face_field(&self, q: &CellField) -> Result<Option<FaceField>> {
        eval_w(q, self.kernel).map(Some)
    }
}

/// One explicit step. The step is clipped so it lands exactly on the next
/// snapshot time or `t_end`.
pub fn nonlocal_step(state: &NonlocalState, config: &SimConfig) -> Result<NonlocalState> {
    let kernel = require_kernel(config)?;
    let grid = *config.grid();
    let dx = grid.dx();
    let w = eval_w(&state.q, kernel)?;
    let mut flux = vec![0.0; grid.n_faces()];
    let max_v = upwind_fluxes(state.q.values(), w.values(), config.velocity(), &mut flux);
    let speed = StepRule::new(config, kernel)?.speed(max_v, state.q.linf_norm());

    let target = config
        .snapshot_times()
        .iter()
        .copied()
        .find(|&t| t > state.time)
        .unwrap_or(config.t_end())
        .min(config.t_end());
    let dt = (config.cfl() * dx / speed.max(MIN_SPEED)).min(target - state.time);
    let courant = dt * speed / dx;
    if courant > 1.0 + 1e-12 {
        return Err(Error::CflViolation {
            step: state.step_index,
            courant,
        });
    }
    let ratio = dt / dx;
    let values = state
        .q
        .values()
        .iter()
        .zip(flux.windows(2))
        .map(|(qi, f)| qi - ratio * (f[1] - f[0]))
        .collect();
    let q = CellField::from_raw(grid, values);
    let w = eval_w(&q, kernel)?;
    let time = if state.time + dt >= target {
        target
    } else {
        state.time + dt
    };
    Ok(NonlocalState {
        time,
        q,
        w,
        step_index: state.step_index + 1,
    })
}

/// Runs the nonlocal law from the sampled datum to `t_end`, checking the
/// maximum principle, mass conservation and L¹ non-increase after every step.
pub fn run_nonlocal(config: &SimConfig) -> Result<RunResult> {
    let kernel = require_kernel(config)?;
    if kernel.length_scale() < config.grid().dx() {
        log::warn!(
            "kernel length {} is below the cell width {}; the operator degenerates toward |q|",
            kernel.length_scale(),
            config.grid().dx()
        );
    }
    let q0 = sample_datum(config.datum(), config.grid());
    let m0 = q0.linf_norm();
    let linf_bound = match kernel {
        KernelSpec::Exponential { .. } => m0,
        KernelSpec::TabulatedBV(_) => (1.0 + KAPPA_SLACK) * m0,
    };
    let mut scheme = NonlocalScheme {
        kernel,
        velocity: config.velocity(),
        rule: StepRule::new(config, kernel)?,
    };
    march(config, q0, &mut scheme, Guards { linf_bound })
}
