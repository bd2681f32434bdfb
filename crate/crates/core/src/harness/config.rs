//! Line-oriented `key = value` configuration files.
//!
//! ```text
//! # comment
//! [grid]
//! x_min = -2
//! x_max = 3
//! n_cells = 2944
//!
//! [datum]
//! breakpoints = -0.5, 0, 0.5
//! values = -0.5, 1
//!
//! [kernel]            # optional; omit (or type = none) for a local run
//! type = exponential  # or: tabulated
//! eta = 0.1
//! # support_length = 0.2
//! # samples = 1, 2, 3
//!
//! [velocity]
//! type = identity     # identity | square | power | tabulated
//! # two_m = 4
//! # abscissae = 0, 1
//! # ordinates = 0, 1
//!
//! [time]
//! t_end = 0.5
//! cfl = 0.5                     # default
//! snapshot_times = 0.25, 0.5    # default: t_end
//! snapshot_stride = 1           # default
//!
//! [sweep]             # turns the file into a singular-limit sweep
//! etas = 0.1, 0.01, 0.001
//! window = -0.6, 1.1            # default
//! reference_refinement = 8      # default
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::Window;
use crate::error::{Error, Result};
use crate::model::{Grid1D, InitialDatum, KernelSpec, SimConfig, TabulatedVelocity, VelocityModel};

use super::csv::format_f64;
use super::sweep::{SweepSpec, DEFAULT_REFINEMENT, DEFAULT_WINDOW};

const SECTIONS: &[(&str, &[&str])] = &[
    ("grid", &["x_min", "x_max", "n_cells"]),
    ("datum", &["breakpoints", "values"]),
    ("kernel", &["type", "eta", "support_length", "samples"]),
    ("velocity", &["type", "two_m", "abscissae", "ordinates"]),
    (
        "time",
        &["t_end", "cfl", "snapshot_times", "snapshot_stride"],
    ),
    ("sweep", &["etas", "window", "reference_refinement"]),
];

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedConfig {
    Run(SimConfig),
    Sweep(SweepSpec),
}

impl ParsedConfig {
    pub fn base(&self) -> &SimConfig {
        match self {
            ParsedConfig::Run(c) => c,
            ParsedConfig::Sweep(s) => &s.base,
        }
    }
}

struct Entry {
    line: usize,
    value: String,
}

struct Document {
    path: PathBuf,
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl Document {
    fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut sections: BTreeMap<String, BTreeMap<String, Entry>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(line, "unterminated section header".into()))?
                    .trim();
                if !SECTIONS.iter().any(|(s, _)| *s == name) {
                    return Err(err(line, format!("unknown section [{name}]")));
                }
                if sections.contains_key(name) {
                    return Err(err(line, format!("duplicate section [{name}]")));
                }
                sections.insert(name.to_string(), BTreeMap::new());
                current = Some(name.to_string());
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `key = value`, got {content:?}")))?;
            let key = key.trim();
            let section = current
                .as_ref()
                .ok_or_else(|| err(line, "key outside of any section".into()))?;
            let allowed = SECTIONS.iter().find(|(s, _)| s == section).unwrap().1;
            if !allowed.contains(&key) {
                return Err(err(line, format!("unknown key `{key}` in [{section}]")));
            }
            let table = sections.get_mut(section).unwrap();
            if table.contains_key(key) {
                return Err(err(line, format!("duplicate key `{key}`")));
            }
            table.insert(
                key.to_string(),
                Entry {
                    line,
                    value: value.trim().to_string(),
                },
            );
        }
        Ok(Self {
            path: path.to_path_buf(),
            sections,
        })
    }

    fn entry(&self, section: &str, key: &str) -> Option<&Entry> {
        self.sections.get(section).and_then(|s| s.get(key))
    }

    fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn parse_err(&self, line: usize, message: String) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            message,
        }
    }

    fn required(&self, section: &str, key: &str) -> Result<&Entry> {
        self.entry(section, key)
            .ok_or_else(|| Error::Validation(format!("missing `{key}` in [{section}]")))
    }

    fn real(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.entry(section, key)
            .map(|e| {
                e.value
                    .parse::<f64>()
                    .map_err(|_| self.parse_err(e.line, format!("`{key}` is not a number")))
            })
            .transpose()
    }

    fn integer(&self, section: &str, key: &str) -> Result<Option<usize>> {
        self.entry(section, key)
            .map(|e| {
                e.value.parse::<usize>().map_err(|_| {
                    self.parse_err(e.line, format!("`{key}` is not a nonnegative integer"))
                })
            })
            .transpose()
    }

    fn list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        self.entry(section, key)
            .map(|e| {
                e.value
                    .split(',')
                    .map(|s| {
                        s.trim().parse::<f64>().map_err(|_| {
                            self.parse_err(
                                e.line,
                                format!("`{key}`: {:?} is not a number", s.trim()),
                            )
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    fn req_real(&self, section: &str, key: &str) -> Result<f64> {
        self.required(section, key)?;
        Ok(self.real(section, key)?.unwrap())
    }

    fn req_list(&self, section: &str, key: &str) -> Result<Vec<f64>> {
        self.required(section, key)?;
        Ok(self.list(section, key)?.unwrap())
    }

    fn word(&self, section: &str, key: &str) -> Option<(usize, String)> {
        self.entry(section, key)
            .map(|e| (e.line, e.value.to_ascii_lowercase()))
    }
}

fn invalid(e: Error) -> Error {
    match e {
        Error::Parse { .. } | Error::Validation(_) | Error::Io { .. } => e,
        other => Error::Validation(other.to_string()),
    }
}

fn kernel_from(doc: &Document) -> Result<Option<KernelSpec>> {
    if !doc.has_section("kernel") {
        return Ok(None);
    }
    let (line, kind) = doc
        .word("kernel", "type")
        .unwrap_or((0, "exponential".to_string()));
    match kind.as_str() {
        "none" => Ok(None),
        "exponential" => {
            let eta = doc.req_real("kernel", "eta")?;
            KernelSpec::exponential(eta).map(Some).map_err(invalid)
        }
        "tabulated" => {
            let support = doc.req_real("kernel", "support_length")?;
            let samples = doc.req_list("kernel", "samples")?;
            KernelSpec::tabulated(support, samples)
                .map(Some)
                .map_err(invalid)
        }
        other => Err(doc.parse_err(line, format!("unknown kernel type `{other}`"))),
    }
}

fn velocity_from(doc: &Document) -> Result<VelocityModel> {
    let (line, kind) = doc
        .word("velocity", "type")
        .ok_or_else(|| Error::Validation("missing `type` in [velocity]".into()))?;
    match kind.as_str() {
        "identity" => Ok(VelocityModel::Identity),
        "square" => Ok(VelocityModel::Square),
        "power" => {
            let two_m = doc
                .integer("velocity", "two_m")?
                .ok_or_else(|| Error::Validation("power velocity needs `two_m`".into()))?;
            VelocityModel::power(two_m as u32).map_err(invalid)
        }
        "tabulated" => {
            let xs = doc.req_list("velocity", "abscissae")?;
            let ys = doc.req_list("velocity", "ordinates")?;
            VelocityModel::tabulated(xs, ys).map_err(invalid)
        }
        other => Err(doc.parse_err(line, format!("unknown velocity type `{other}`"))),
    }
}

fn sim_config_from(doc: &Document) -> Result<SimConfig> {
    let grid = Grid1D::new(
        doc.req_real("grid", "x_min")?,
        doc.req_real("grid", "x_max")?,
        doc.integer("grid", "n_cells")?
            .ok_or_else(|| Error::Validation("missing `n_cells` in [grid]".into()))?,
    )
    .map_err(invalid)?;
    let datum = InitialDatum::new(
        doc.req_list("datum", "breakpoints")?,
        doc.req_list("datum", "values")?,
    )
    .map_err(invalid)?;
    let kernel = kernel_from(doc)?;
    let velocity = velocity_from(doc)?;
    let t_end = doc.req_real("time", "t_end")?;

    let mut cfg = SimConfig::new(grid, datum, kernel, velocity, t_end).map_err(invalid)?;
    if let Some(cfl) = doc.real("time", "cfl")? {
        cfg = cfg.with_cfl(cfl).map_err(invalid)?;
    }
    if let Some(times) = doc.list("time", "snapshot_times")? {
        cfg = cfg.with_snapshot_times(times).map_err(invalid)?;
    }
    if let Some(stride) = doc.integer("time", "snapshot_stride")? {
        cfg = cfg.with_snapshot_stride(stride).map_err(invalid)?;
    }
    Ok(cfg)
}

/// Parses configuration text; `path` is only used in error messages.
pub fn parse_config_str(text: &str, path: &Path) -> Result<ParsedConfig> {
    let doc = Document::parse(text, path)?;
    let base = sim_config_from(&doc)?;
    if !doc.has_section("sweep") {
        return Ok(ParsedConfig::Run(base));
    }
    let etas = doc.req_list("sweep", "etas")?;
    let window = match doc.list("sweep", "window")? {
        Some(w) if w.len() == 2 => Window::new(w[0], w[1])?,
        Some(_) => {
            let line = doc.entry("sweep", "window").unwrap().line;
            return Err(doc.parse_err(line, "`window` needs exactly two numbers".into()));
        }
        None => DEFAULT_WINDOW,
    };
    let refinement = doc
        .integer("sweep", "reference_refinement")?
        .unwrap_or(DEFAULT_REFINEMENT);
    SweepSpec::new(base, etas, window, refinement).map(ParsedConfig::Sweep)
}

pub fn parse_config(path: &Path) -> Result<ParsedConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text, path)
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format_f64(*v))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Renders the effective configuration, defaults included, in the same
/// schema `parse_config` reads.
pub fn render_config(config: &ParsedConfig) -> String {
    let cfg = config.base();
    let g = cfg.grid();
    let mut out = String::new();
    let _ = writeln!(out, "[grid]");
    let _ = writeln!(out, "x_min = {}", format_f64(g.x_min()));
    let _ = writeln!(out, "x_max = {}", format_f64(g.x_max()));
    let _ = writeln!(out, "n_cells = {}", g.n_cells());
    let _ = writeln!(out, "\n[datum]");
    let _ = writeln!(out, "breakpoints = {}", join(cfg.datum().breakpoints()));
    let _ = writeln!(out, "values = {}", join(cfg.datum().values()));
    if let Some(k) = cfg.kernel() {
        let _ = writeln!(out, "\n[kernel]");
        match k {
            KernelSpec::Exponential { eta } => {
                let _ = writeln!(out, "type = exponential");
                let _ = writeln!(out, "eta = {}", format_f64(*eta));
            }
            KernelSpec::TabulatedBV(t) => {
                let _ = writeln!(out, "type = tabulated");
                let _ = writeln!(out, "support_length = {}", format_f64(t.support_length()));
                let _ = writeln!(out, "samples = {}", join(t.raw_samples()));
            }
        }
    }
    let _ = writeln!(out, "\n[velocity]");
    let _ = writeln!(out, "type = {}", cfg.velocity().name());
    match cfg.velocity() {
        VelocityModel::Power { two_m } => {
            let _ = writeln!(out, "two_m = {two_m}");
        }
        VelocityModel::Tabulated(t) => {
            let t: &TabulatedVelocity = t;
            let _ = writeln!(out, "abscissae = {}", join(t.abscissae()));
            let _ = writeln!(out, "ordinates = {}", join(t.ordinates()));
        }
        _ => {}
    }
    let _ = writeln!(out, "\n[time]");
    let _ = writeln!(out, "t_end = {}", format_f64(cfg.t_end()));
    let _ = writeln!(out, "cfl = {}", format_f64(cfg.cfl()));
    let _ = writeln!(out, "snapshot_times = {}", join(cfg.snapshot_times()));
    let _ = writeln!(out, "snapshot_stride = {}", cfg.snapshot_stride());
    if let ParsedConfig::Sweep(s) = config {
        let _ = writeln!(out, "\n[sweep]");
        let _ = writeln!(out, "etas = {}", join(&s.etas));
        let _ = writeln!(
            out,
            "window = {}, {}",
            format_f64(s.window.lo),
            format_f64(s.window.hi)
        );
        let _ = writeln!(out, "reference_refinement = {}", s.reference_refinement);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const LOCAL: &str = "
[grid]
x_min = -2
x_max = 3
n_cells = 500

[datum]
breakpoints = -0.5, 0, 0.5
values = -0.5, 1

[velocity]
type = identity

[time]
t_end = 0.5
";

    fn parse(text: &str) -> Result<ParsedConfig> {
        parse_config_str(text, Path::new("test.cfg"))
    }

    #[test]
    fn minimal_local_file_gets_defaults() {
        let ParsedConfig::Run(cfg) = parse(LOCAL).unwrap() else {
            panic!("expected a run config")
        };
        assert!(cfg.kernel().is_none());
        assert_eq!(cfg.cfl(), 0.5);
        assert_eq!(cfg.snapshot_times(), &[0.5]);
        assert_eq!(cfg.snapshot_stride(), 1);
    }

    #[test]
    fn exponential_kernel() {
        let text = format!("{LOCAL}\n[kernel]\ntype = exponential\neta = 0.1\n");
        let cfg = parse(&text).unwrap();
        assert_eq!(
            cfg.base().kernel(),
            Some(&KernelSpec::Exponential { eta: 0.1 })
        );
    }

    #[test]
    fn sweep_section() {
        let text = format!("{LOCAL}\n[sweep]\netas = 0.1, 0.01, 0.001\n");
        let ParsedConfig::Sweep(s) = parse(&text).unwrap() else {
            panic!("expected a sweep")
        };
        assert_eq!(s.etas, vec![0.1, 0.01, 0.001]);
        assert_eq!(s.reference_refinement, 8);
        assert_eq!(s.window, DEFAULT_WINDOW);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = LOCAL.replace("n_cells = 500", "n_cells = lots");
        assert!(matches!(parse(&bad), Err(Error::Parse { line: 5, .. })));
        let bad = format!("{LOCAL}\n[time2]\n");
        assert!(matches!(parse(&bad), Err(Error::Parse { .. })));
        let bad = LOCAL.replace("type = identity", "type = identity\ncolour = red");
        assert!(matches!(parse(&bad), Err(Error::Parse { line: 13, .. })));
        assert!(matches!(
            parse("x = 1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn validation_errors_name_the_invariant() {
        let bad = LOCAL.replace("x_max = 3", "x_max = 0.6");
        match parse(&bad) {
            Err(Error::Validation(msg)) => assert!(msg.contains("boundary"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        let bad = LOCAL.replace(
            "type = identity",
            "type = tabulated\nabscissae = 0, 1\nordinates = 1, 0.5",
        );
        assert!(matches!(parse(&bad), Err(Error::Validation(_))));
        let bad = LOCAL.replace("t_end = 0.5", "");
        assert!(matches!(parse(&bad), Err(Error::Validation(_))));
        let bad = format!("{LOCAL}\n[sweep]\netas = 0.01, 0.1\n");
        assert!(matches!(parse(&bad), Err(Error::Validation(_))));
    }

    #[test]
    fn rendered_config_parses_back_identically() {
        let text = format!(
            "{LOCAL}\n[kernel]\ntype = tabulated\nsupport_length = 0.2\nsamples = 1, 3, 2\n[sweep]\netas = 0.1, 0.05\nwindow = -0.5, 1\n"
        );
        let cfg = parse(&text).unwrap();
        let again = parse(&render_config(&cfg)).unwrap();
        assert_eq!(cfg, again);
        let cfg = parse(
            &LOCAL
                .replace("identity", "power\ntwo_m = 4")
                .replace("x_max = 3", "x_max = 5"),
        )
        .unwrap();
        assert_eq!(parse(&render_config(&cfg)).unwrap(), cfg);
    }
}
