//! The four-panel singular-limit experiment: two sign-changing data, two
//! velocity laws, three kernel lengths each.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Grid1D, InitialDatum, SimConfig, VelocityModel};

use super::config::{render_config, ParsedConfig};
use super::csv::{format_f64, write_snapshot_csv, write_table_csv};
use super::sweep::{run_sweep, SweepRuns, SweepSpec, DEFAULT_REFINEMENT, DEFAULT_WINDOW};

pub const FIGURE1_ETAS: [f64; 3] = [1e-1, 1e-2, 1e-3];
pub const FIGURE1_DOMAIN: (f64, f64) = (-2.0, 3.0);
pub const FIGURE1_T_END: f64 = 0.5;
pub const FIGURE1_SNAPSHOT_TIMES: [f64; 2] = [0.25, 0.5];
pub const FIGURE1_STRIDE: usize = 4;

/// Cells on the padded domain that keep the spacing of 1001 cells across
/// the plotted window.
pub fn figure1_n_cells() -> usize {
    let dx = (DEFAULT_WINDOW.hi - DEFAULT_WINDOW.lo) / 1001.0;
    ((FIGURE1_DOMAIN.1 - FIGURE1_DOMAIN.0) / dx).round() as usize
}

/// `-½·χ(-0.5, 0) + χ(0, 0.5)`.
pub fn top_datum() -> InitialDatum {
    InitialDatum::new(vec![-0.5, 0.0, 0.5], vec![-0.5, 1.0]).expect("valid datum")
}

/// `½·χ(-0.5, 0) - χ(0, 0.5)`.
pub fn bottom_datum() -> InitialDatum {
    InitialDatum::new(vec![-0.5, 0.0, 0.5], vec![0.5, -1.0]).expect("valid datum")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure1Options {
    pub n_cells: usize,
    pub etas: Vec<f64>,
    pub snapshot_times: Vec<f64>,
    pub snapshot_stride: usize,
    pub reference_refinement: usize,
}

impl Default for Figure1Options {
    fn default() -> Self {
        Self {
            n_cells: figure1_n_cells(),
            etas: FIGURE1_ETAS.to_vec(),
            snapshot_times: FIGURE1_SNAPSHOT_TIMES.to_vec(),
            snapshot_stride: FIGURE1_STRIDE,
            reference_refinement: DEFAULT_REFINEMENT,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Figure1Panel {
    /// `A1`, `A2`, `B1`, `B2`: row = datum, column = velocity.
    pub name: &'static str,
    pub description: &'static str,
    pub runs: SweepRuns,
}

#[derive(Debug, Clone)]
pub struct Figure1Report {
    pub panels: Vec<Figure1Panel>,
    /// Every file written, in write order.
    pub files: Vec<PathBuf>,
}

pub fn figure1_specs(
    opts: &Figure1Options,
) -> Result<Vec<(&'static str, &'static str, SweepSpec)>> {
    let grid = Grid1D::new(FIGURE1_DOMAIN.0, FIGURE1_DOMAIN.1, opts.n_cells)?;
    let panels = [
        (
            "A1",
            "top datum, V(w) = w",
            top_datum(),
            VelocityModel::Identity,
        ),
        (
            "A2",
            "top datum, V(w) = w^2",
            top_datum(),
            VelocityModel::Square,
        ),
        (
            "B1",
            "bottom datum, V(w) = w",
            bottom_datum(),
            VelocityModel::Identity,
        ),
        (
            "B2",
            "bottom datum, V(w) = w^2",
            bottom_datum(),
            VelocityModel::Square,
        ),
    ];
    panels
        .into_iter()
        .map(|(name, desc, datum, velocity)| {
            let base = SimConfig::new(grid, datum, None, velocity, FIGURE1_T_END)?
                .with_snapshot_times(opts.snapshot_times.clone())?
                .with_snapshot_stride(opts.snapshot_stride)?;
            let spec = SweepSpec::new(
                base,
                opts.etas.clone(),
                DEFAULT_WINDOW,
                opts.reference_refinement,
            )?;
            Ok((name, desc, spec))
        })
        .collect()
}

fn eta_label(eta: f64) -> String {
    format!("{eta:e}")
}

fn metadata(opts: &Figure1Options, panels: &[Figure1Panel]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# figure1 run metadata");
    let times: Vec<String> = opts.snapshot_times.iter().map(|t| format_f64(*t)).collect();
    let _ = writeln!(out, "snapshot_times = {}", times.join(", "));
    if opts.snapshot_times == FIGURE1_SNAPSHOT_TIMES {
        let _ = writeln!(out, "note: snapshot times are the built-in defaults");
    }
    let _ = writeln!(
        out,
        "note: convergence is measured by L1 distance on the window [{}, {}] at t_end; \
         this stands in for weak-star convergence, which is not checked directly",
        format_f64(DEFAULT_WINDOW.lo),
        format_f64(DEFAULT_WINDOW.hi)
    );
    let _ = writeln!(
        out,
        "reference: local Godunov run on a grid refined {}x, averaged back to the base grid",
        opts.reference_refinement
    );
    for p in panels {
        let _ = writeln!(out, "\n## panel {} ({})", p.name, p.description);
        out.push_str(&render_config(&ParsedConfig::Sweep(p.runs.spec.clone())));
    }
    out
}

/// Runs all four panels (in parallel) and writes, into `output_dir`:
/// per panel a convergence table and one snapshot CSV per run and snapshot
/// time, plus `metadata.txt`.
pub fn figure1_with(output_dir: &Path, opts: &Figure1Options) -> Result<Figure1Report> {
    let specs = figure1_specs(opts)?;
    let runs = specs
        .par_iter()
        .map(|(_, _, spec)| run_sweep(spec))
        .collect::<Result<Vec<_>>>()?;
    let panels: Vec<Figure1Panel> = specs
        .into_iter()
        .zip(runs)
        .map(|((name, description, _), runs)| Figure1Panel {
            name,
            description,
            runs,
        })
        .collect();

    fs::create_dir_all(output_dir).map_err(|e| Error::io(output_dir, e))?;
    let mut files = Vec::new();
    for p in &panels {
        let path = output_dir.join(format!("{}_table.csv", p.name));
        write_table_csv(&p.runs.table, &path)?;
        files.push(path);
        for (k, snap) in p.runs.reference_coarse.iter().enumerate() {
            let path = output_dir.join(format!("{}_reference_t{}.csv", p.name, k + 1));
            write_snapshot_csv(snap, &path)?;
            files.push(path);
        }
        for (eta, run) in p.runs.spec.etas.iter().zip(&p.runs.nonlocal) {
            for (k, snap) in run.snapshots.iter().enumerate() {
                let path =
                    output_dir.join(format!("{}_eta_{}_t{}.csv", p.name, eta_label(*eta), k + 1));
                write_snapshot_csv(snap, &path)?;
                files.push(path);
            }
        }
    }
    let path = output_dir.join("metadata.txt");
    fs::write(&path, metadata(opts, &panels)).map_err(|e| Error::io(&path, e))?;
    files.push(path);
    Ok(Figure1Report { panels, files })
}

pub fn figure1(output_dir: &Path) -> Result<Figure1Report> {
    figure1_with(output_dir, &Figure1Options::default())
}
