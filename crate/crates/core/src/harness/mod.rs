//! Config files, CSV artifacts, sweeps and the four-panel experiment.

mod config;
mod csv;
mod figure1;
mod sweep;

pub use config::{parse_config, parse_config_str, render_config, ParsedConfig};
pub use csv::{
    format_f64, parse_snapshot_csv, parse_table_csv, read_snapshot_csv, snapshot_to_string,
    table_to_string, write_diagnostics_csv, write_snapshot_csv, write_table_csv, SnapshotData,
    DIAGNOSTICS_HEADER, SNAPSHOT_HEADER, TABLE_HEADER,
};
pub use figure1::{
    bottom_datum, figure1, figure1_n_cells, figure1_specs, figure1_with, top_datum, Figure1Options,
    Figure1Panel, Figure1Report, FIGURE1_DOMAIN, FIGURE1_ETAS, FIGURE1_SNAPSHOT_TIMES,
    FIGURE1_STRIDE, FIGURE1_T_END,
};
pub use sweep::{
    audit_bumps, run_sweep, singular_limit_sweep, ConvergenceRow, ConvergenceTable, SweepRuns,
    SweepSpec, DEFAULT_REFINEMENT, DEFAULT_WINDOW,
};
