use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;

use nonlocal_limit::analysis::{entropy_min, l1_distance, EntropyPair, Window};
use nonlocal_limit::harness::{
    audit_bumps, figure1, format_f64, parse_config, read_snapshot_csv, run_sweep, table_to_string,
    write_diagnostics_csv, write_snapshot_csv, write_table_csv, ParsedConfig,
};
use nonlocal_limit::{run_local, run_nonlocal, Error, FluxFunction, Result, RunResult, SimConfig};

#[derive(Parser)]
#[command(
    name = "nonlocal-limit",
    version,
    about = "Nonlocal-to-local singular limit lab"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation (nonlocal if the config has a kernel, local otherwise).
    Run {
        config: PathBuf,
        /// Directory for snapshot and diagnostics CSVs.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a singular-limit sweep and print its convergence table.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the four-panel experiment into a directory.
    Figure1 {
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the entropy functional over the default bump family.
    EntropyAudit {
        config: PathBuf,
        /// Also audit the smoothed Kruzkov pair at these levels.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        kruzkov: Vec<f64>,
    },
    /// Windowed L1 distance between two snapshot CSVs.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// `lo,hi`
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        window: Vec<f64>,
    },
}

fn simulate(config: &SimConfig) -> Result<RunResult> {
    if config.kernel().is_some() {
        run_nonlocal(config)
    } else {
        run_local(config)
    }
}

fn run_config(path: &Path) -> Result<SimConfig> {
    match parse_config(path)? {
        ParsedConfig::Run(c) => Ok(c),
        ParsedConfig::Sweep(_) => Err(Error::Validation(format!(
            "{} describes a sweep; use the `sweep` subcommand",
            path.display()
        ))),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn cmd_run(config: &Path, out: Option<&Path>) -> Result<()> {
    let cfg = run_config(config)?;
    let result = simulate(&cfg)?;
    info!("{} steps", result.steps);
    if let Some(dir) = out {
        create_dir(dir)?;
        for (k, snap) in result.snapshots.iter().enumerate() {
            write_snapshot_csv(snap, &dir.join(format!("snapshot_t{}.csv", k + 1)))?;
        }
        write_diagnostics_csv(&result.diagnostics, &dir.join("diagnostics.csv"))?;
    }
    let d = &result.diagnostics;
    println!("steps = {}", result.steps);
    println!("max_linf = {}", format_f64(d.max_linf()));
    println!("max_mass_drift = {}", format_f64(d.max_mass_drift()));
    println!("max_l1_increase = {}", format_f64(d.max_l1_increase()));
    Ok(())
}

fn cmd_sweep(config: &Path, out: Option<&Path>) -> Result<()> {
    let spec = match parse_config(config)? {
        ParsedConfig::Sweep(s) => s,
        ParsedConfig::Run(_) => {
            return Err(Error::Validation(format!(
                "{} has no [sweep] section",
                config.display()
            )))
        }
    };
    let runs = run_sweep(&spec)?;
    if let Some(dir) = out {
        create_dir(dir)?;
        write_table_csv(&runs.table, &dir.join("table.csv"))?;
    }
    print!("{}", table_to_string(&runs.table));
    Ok(())
}

fn cmd_figure1(out: &Path) -> Result<()> {
    let report = figure1(out)?;
    for p in &report.panels {
        println!("panel {} ({})", p.name, p.description);
        print!("{}", table_to_string(&p.runs.table));
    }
    println!("wrote {} files to {}", report.files.len(), out.display());
    Ok(())
}

fn cmd_entropy_audit(config: &Path, kruzkov: &[f64]) -> Result<()> {
    let cfg = run_config(config)?;
    let result = simulate(&cfg)?;
    let bumps = audit_bumps(&cfg)?;
    let flux = FluxFunction::new(cfg.velocity().clone());
    let scale = bumps.iter().map(|b| b.scale()).fold(0.0, f64::max);
    println!("bumps = {}", bumps.len());
    println!("bump_scale = {}", format_f64(scale));
    let e = entropy_min(&result, EntropyPair::Quadratic, &bumps, &flux)?;
    println!("quadratic min_E = {}", format_f64(e));
    for &k in kruzkov {
        let e = entropy_min(&result, EntropyPair::kruzkov(k), &bumps, &flux)?;
        println!("kruzkov k={} min_E = {}", format_f64(k), format_f64(e));
    }
    Ok(())
}

fn cmd_compare(a: &Path, b: &Path, window: &[f64]) -> Result<()> {
    let [lo, hi] = window[..] else {
        return Err(Error::Validation(format!(
            "--window takes lo,hi; got {} values",
            window.len()
        )));
    };
    let fa = read_snapshot_csv(a)?.cell_field()?;
    let fb = read_snapshot_csv(b)?.cell_field()?;
    let w = Window::new(lo, hi)?;
    println!("{}", format_f64(l1_distance(&fa, &fb, w)?));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { config, out } => cmd_run(config, out.as_deref()),
        Command::Sweep { config, out } => cmd_sweep(config, out.as_deref()),
        Command::Figure1 { out } => cmd_figure1(out),
        Command::EntropyAudit { config, kruzkov } => cmd_entropy_audit(config, kruzkov),
        Command::Compare { a, b, window } => cmd_compare(a, b, window),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
