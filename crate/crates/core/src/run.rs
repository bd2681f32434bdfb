//! Run output and the explicit time-marching driver shared by the nonlocal
//! and local solvers.

use crate::error::{Error, Result};
use crate::model::{CellField, Grid1D, SimConfig};
use crate::operator::FaceField;

/// Floor on the signal speed in the time-step formula.
pub const MIN_SPEED: f64 = 1e-14;

/// Per-step round-off allowance, relative to `1 + |mass₀|`.
pub const MASS_TOL_PER_STEP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub q: CellField,
    /// Operator values; `None` for local runs.
    pub w: Option<FaceField>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow {
    pub time: f64,
    pub mass: f64,
    pub l1: f64,
    pub linf: f64,
    pub tv: f64,
}

impl DiagnosticsRow {
    fn of(time: f64, q: &CellField) -> Self {
        let v = q.values();
        Self {
            time,
            mass: q.mass(),
            l1: q.l1_norm(),
            linf: q.linf_norm(),
            tv: v.windows(2).map(|w| (w[1] - w[0]).abs()).sum(),
        }
    }
}

/// One row per accepted step, starting with the initial state.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsSeries {
    pub rows: Vec<DiagnosticsRow>,
}

impl DiagnosticsSeries {
    pub fn max_linf(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.linf))
    }

    pub fn max_mass_drift(&self) -> f64 {
        let m0 = self.rows.first().map_or(0.0, |r| r.mass);
        self.rows
            .iter()
            .fold(0.0, |m, r| m.max((r.mass - m0).abs()))
    }

    /// Largest single-step increase of `Σ|q| dx` (zero or negative when L¹
    /// never grows).
    pub fn max_l1_increase(&self) -> f64 {
        self.rows
            .windows(2)
            .map(|w| w[1].l1 - w[0].l1)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A retained time level of the trajectory, kept for space-time functionals.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub time: f64,
    pub q: CellField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub grid: Grid1D,
    pub snapshots: Vec<Snapshot>,
    /// Step 0, every `snapshot_stride`-th step, and the final step.
    pub trajectory: Vec<TrajectoryPoint>,
    pub diagnostics: DiagnosticsSeries,
    pub steps: usize,
}

impl RunResult {
    pub fn final_snapshot(&self) -> &Snapshot {
        self.snapshots
            .last()
            .expect("a run always records a snapshot")
    }

    /// Snapshot recorded at exactly `time`, if configured.
    pub fn snapshot_at(&self, time: f64) -> Option<&Snapshot> {
        self.snapshots.iter().find(|s| s.time == time)
    }

    pub fn initial(&self) -> &CellField {
        &self.trajectory[0].q
    }
}

/// What the driver needs from a numerical scheme.
pub(crate) trait FluxScheme {
    /// Fills `flux` (one entry per face) for state `q` and returns the largest
    /// signal speed the time step must respect.
    fn fluxes(&mut self, q: &CellField, flux: &mut [f64]) -> Result<f64>;

    /// Auxiliary face field stored with snapshots.
    fn face_field(&self, q: &CellField) -> Result<Option<FaceField>>;
}

/// Invariant checks performed after each step.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Guards {
    pub linf_bound: f64,
}

pub(crate) fn march<S: FluxScheme>(
    config: &SimConfig,
    initial: CellField,
    scheme: &mut S,
    guards: Guards,
) -> Result<RunResult> {
    let grid = *config.grid();
    let dx = grid.dx();
    let t_end = config.t_end();
    let stride = config.snapshot_stride();

    let mut q = initial;
    let mut time = 0.0;
    let mut step = 0usize;
    let mut flux = vec![0.0; grid.n_faces()];

    let mut diagnostics = DiagnosticsSeries::default();
    let first = DiagnosticsRow::of(0.0, &q);
    let mass0 = first.mass;
    let l1_scale = first.l1.max(1.0);
    diagnostics.rows.push(first);

    let mut snapshots = Vec::with_capacity(config.snapshot_times().len());
    let mut pending = config.snapshot_times().iter().copied().peekable();
    while let Some(&ts) = pending.peek() {
        if ts > 0.0 {
            break;
        }
        snapshots.push(Snapshot {
            time: 0.0,
            w: scheme.face_field(&q)?,
            q: q.clone(),
        });
        pending.next();
    }
    let mut trajectory = vec![TrajectoryPoint {
        time: 0.0,
        q: q.clone(),
    }];

    while time < t_end {
        let speed = scheme.fluxes(&q, &mut flux)?;
        let target = pending.peek().copied().unwrap_or(t_end).min(t_end);
        let dt_cfl = config.cfl() * dx / speed.max(MIN_SPEED);
        let (dt, hit) = if time + dt_cfl >= target {
            (target - time, true)
        } else {
            (dt_cfl, false)
        };
        let courant = dt * speed / dx;
        if courant > 1.0 + 1e-12 {
            return Err(Error::CflViolation { step, courant });
        }

        let ratio = dt / dx;
        let values: Vec<f64> = q
            .values()
            .iter()
            .zip(flux.windows(2))
            .map(|(qi, f)| qi - ratio * (f[1] - f[0]))
            .collect();
        q = CellField::from_raw(grid, values);
        step += 1;
        time = if hit { target } else { time + dt };

        let row = DiagnosticsRow::of(time, &q);
        let prev_l1 = diagnostics.rows.last().unwrap().l1;
        if !row.mass.is_finite() || !row.linf.is_finite() {
            return Err(Error::InvariantViolation {
                step,
                time,
                what: "non-finite state".into(),
            });
        }
        let mass_tol = MASS_TOL_PER_STEP * (1.0 + mass0.abs()) * step as f64;
        if (row.mass - mass0).abs() > mass_tol {
            return Err(Error::InvariantViolation {
                step,
                time,
                what: format!("mass drifted from {mass0} to {}", row.mass),
            });
        }
        if row.linf > guards.linf_bound + 1e-12 {
            return Err(Error::InvariantViolation {
                step,
                time,
                what: format!(
                    "maximum principle: max|q| = {} exceeds {}",
                    row.linf, guards.linf_bound
                ),
            });
        }
        if row.l1 > prev_l1 + 1e-12 * l1_scale {
            return Err(Error::InvariantViolation {
                step,
                time,
                what: format!("L1 norm grew from {prev_l1} to {}", row.l1),
            });
        }
        diagnostics.rows.push(row);

        if hit && pending.peek().is_some_and(|&ts| ts == target) {
            snapshots.push(Snapshot {
                time,
                w: scheme.face_field(&q)?,
                q: q.clone(),
            });
            pending.next();
        }
        if step.is_multiple_of(stride) || time >= t_end {
            trajectory.push(TrajectoryPoint { time, q: q.clone() });
        }
    }

    Ok(RunResult {
        grid,
        snapshots,
        trajectory,
        diagnostics,
        steps: step,
    })
}
