//! Singular-limit sweeps: one fine local reference, one nonlocal run per
//! kernel length, and a table of windowed distances at the final time.

use rayon::prelude::*;

use crate::analysis::{
    bump_lattice, coarsen, entropy_min, l1_distance, EntropyPair, TestBump, Window,
};
use crate::error::{Error, Result};
use crate::local::{run_local, FluxFunction};
use crate::model::{CellField, KernelSpec, SimConfig};
use crate::nonlocal::run_nonlocal;
use crate::run::{RunResult, Snapshot};

pub const DEFAULT_WINDOW: Window = Window { lo: -0.6, hi: 1.1 };
pub const DEFAULT_REFINEMENT: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SimConfig,
    /// Strictly decreasing kernel lengths.
    pub etas: Vec<f64>,
    pub window: Window,
    pub reference_refinement: usize,
}

impl SweepSpec {
    pub fn new(
        base: SimConfig,
        etas: Vec<f64>,
        window: Window,
        reference_refinement: usize,
    ) -> Result<Self> {
        if etas.is_empty() {
            return Err(Error::Validation("sweep needs at least one eta".into()));
        }
        if etas.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::Validation("etas must be positive".into()));
        }
        if etas.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Validation("etas must be strictly decreasing".into()));
        }
        if reference_refinement == 0 {
            return Err(Error::Validation(
                "reference_refinement must be positive".into(),
            ));
        }
        let g = base.grid();
        if window.lo < g.x_min() || window.hi > g.x_max() {
            return Err(Error::Validation(format!(
                "comparison window [{}, {}] leaves the domain [{}, {}]",
                window.lo,
                window.hi,
                g.x_min(),
                g.x_max()
            )));
        }
        Ok(Self {
            base,
            etas,
            window,
            reference_refinement,
        })
    }

    /// Bump family covering the region the solution can reach by `t_end`.
    pub fn bumps(&self) -> Result<Vec<TestBump>> {
        audit_bumps(&self.base)
    }
}

/// Default audit lattice for a configuration: spans the datum's support
/// extended by `t_end · V(‖q₀‖∞)`.
pub fn audit_bumps(config: &SimConfig) -> Result<Vec<TestBump>> {
    let (lo, hi) = config.datum().support();
    let speed = config.velocity().eval(config.datum().linf_norm()).max(0.0);
    bump_lattice(config.t_end(), lo, hi + config.t_end() * speed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub eta: f64,
    /// `‖q_η(t_end) - q_ref(t_end)‖_{L¹(window)}`.
    pub l1_q: f64,
    /// `‖W_η(t_end) - |q_ref(t_end)|‖_{L¹(window)}`.
    pub l1_w: f64,
    /// `max_t ‖q_η(t)‖∞`.
    pub linf_max: f64,
    /// Minimum of the quadratic-entropy functional over the bump family.
    pub entropy_min: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

/// Everything a sweep computed, kept for artifact writing and post-hoc checks.
#[derive(Debug, Clone)]
pub struct SweepRuns {
    pub spec: SweepSpec,
    /// Local run on the refined grid.
    pub reference: RunResult,
    /// Reference snapshots averaged down to the base grid.
    pub reference_coarse: Vec<Snapshot>,
    /// Nonlocal runs, in `etas` order.
    pub nonlocal: Vec<RunResult>,
    pub table: ConvergenceTable,
}

impl SweepRuns {
    pub fn reference_final(&self) -> &CellField {
        &self.reference_coarse.last().expect("reference snapshot").q
    }
}

pub(crate) fn reference_config(spec: &SweepSpec) -> Result<SimConfig> {
    let fine = spec.base.grid().refined(spec.reference_refinement)?;
    spec.base
        .clone()
        .with_kernel(None)?
        .with_grid(fine)?
        .with_snapshot_stride(usize::MAX)
}

fn row_for(
    eta: f64,
    run: &RunResult,
    reference: &CellField,
    window: Window,
    bumps: &[TestBump],
    flux: &FluxFunction,
) -> Result<ConvergenceRow> {
    let last = run.final_snapshot();
    let w = last
        .w
        .as_ref()
        .expect("nonlocal snapshots carry the operator")
        .right_face_cells();
    Ok(ConvergenceRow {
        eta,
        l1_q: l1_distance(&last.q, reference, window)?,
        l1_w: l1_distance(&w, &reference.abs(), window)?,
        linf_max: run.diagnostics.max_linf(),
        entropy_min: entropy_min(run, EntropyPair::Quadratic, bumps, flux)?,
    })
}

/// Runs the reference and every nonlocal configuration (in parallel) and
/// fills the convergence table.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepRuns> {
    let ref_cfg = reference_config(spec)?;
    let nonlocal_cfgs = spec
        .etas
        .iter()
        .map(|&eta| {
            spec.base
                .clone()
                .with_kernel(Some(KernelSpec::exponential(eta)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let (reference, nonlocal) = rayon::join(
        || run_local(&ref_cfg),
        || {
            nonlocal_cfgs
                .par_iter()
                .map(run_nonlocal)
                .collect::<Result<Vec<_>>>()
        },
    );
    let reference = reference?;
    let nonlocal = nonlocal?;

    let reference_coarse = reference
        .snapshots
        .iter()
        .map(|s| {
            Ok(Snapshot {
                time: s.time,
                q: coarsen(&s.q, spec.reference_refinement)?,
                w: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ref_final = reference_coarse
        .last()
        .expect("reference snapshot")
        .q
        .clone();

    let bumps = spec.bumps()?;
    let flux = FluxFunction::new(spec.base.velocity().clone());
    let rows = spec
        .etas
        .par_iter()
        .zip(nonlocal.par_iter())
        .map(|(&eta, run)| row_for(eta, run, &ref_final, spec.window, &bumps, &flux))
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepRuns {
        spec: spec.clone(),
        reference,
        reference_coarse,
        nonlocal,
        table: ConvergenceTable { rows },
    })
}

pub fn singular_limit_sweep(spec: &SweepSpec) -> Result<ConvergenceTable> {
    run_sweep(spec).map(|r| r.table)
}
