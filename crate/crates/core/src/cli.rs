//! Command-line front end. Exit codes: 0 success, 1 physics or validation
//! failure, 2 usage or configuration error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::config::{load_config, Preset, RunConfig};
use crate::ensemble::run_experiment;
use crate::error::{Error, Result};
use crate::output::{create_file, field_rows, write_fields, write_json, write_snapshots, StatsReport};
use crate::units::Species;
use crate::validate::{run_validation, Fault};

#[derive(Debug, Parser)]
#[command(name = "chiralsg", version, about = "Chiral optical gauge potentials and Stern-Gerlach ensembles")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Parameter preset (fig3abc or fig3def); overrides [physical].
    #[arg(long, global = true, value_name = "NAME")]
    pub preset: Option<String>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for trajectory integration (results do not depend on it).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write fields.csv: A, V, B, θ and ∂ₓθ over the x grid for both chiralities.
    Fields,
    /// Integrate the ensemble; write snapshots.csv and stats.json.
    Simulate,
    /// Run the oracle suite; exit 1 if any check fails.
    Validate {
        #[arg(long, hide = true, value_name = "FAULT")]
        inject_fault: Option<String>,
    },
    /// Fields and simulation for both presets, one subdirectory each.
    Reproduce,
}

/// Builds the effective configuration from file and flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(name) = &cli.preset {
        cfg.set_preset(name.parse::<Preset>()?);
    }
    if let Some(seed) = cli.seed {
        cfg.set_seed(seed);
    }
    if let Some(dir) = &cli.out {
        cfg.output_dir = dir.clone();
    }
    if cli.threads == Some(0) {
        return Err(Error::Validation(vec!["--threads must be at least 1".into()]));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit<T: serde::Serialize>(value: &T) -> Result<()> {
    let stdout = std::io::stdout();
    write_json(stdout.lock(), value)
}

pub fn cmd_fields(cfg: &RunConfig, dir: &Path) -> Result<PathBuf> {
    let model = cfg.model()?;
    let rows = field_rows(&model, &cfg.grid);
    let mut f = create_file(dir, "fields.csv")?;
    write_fields(&mut f, &rows)?;
    f.flush().map_err(|e| Error::io("writing fields.csv", e))?;
    Ok(dir.join("fields.csv"))
}

pub fn cmd_simulate(cfg: &RunConfig, dir: &Path) -> Result<StatsReport> {
    let params = cfg.normalized()?;
    let model = cfg.model()?;
    let result = run_experiment(&model, &cfg.ensemble, &cfg.integrator)?;
    let mut f = create_file(dir, "snapshots.csv")?;
    write_snapshots(&mut f, &result, &params)?;
    f.flush().map_err(|e| Error::io("writing snapshots.csv", e))?;
    let report = StatsReport::new(cfg, &params, &result);
    write_json(create_file(dir, "stats.json")?, &report)?;
    Ok(report)
}

fn summarize(report: &StatsReport) {
    if let Some(last) = report.final_stats() {
        println!("t = {} ({} ms)", last.time, report.metadata.normalized.to_millis(last.time));
        for s in &last.species {
            println!("  {:<7} centroid x {:+.4} z {:+.4}  spread {:.4}", s.species, s.centroid[0], s.centroid[1], s.spread);
        }
    }
    println!("max energy drift {:.3e}, max adiabaticity ratio {:.3e}", report.max_energy_drift, report.max_adiabatic_ratio);
}

fn execute(cli: &Cli, cfg: &RunConfig) -> Result<i32> {
    let dir = cfg.output_dir.clone();
    match &cli.command {
        Command::Fields => {
            let path = cmd_fields(cfg, &dir)?;
            if cli.json {
                emit(&json!({ "fields": path }))?;
            } else {
                println!("wrote {}", path.display());
            }
        }
        Command::Simulate => {
            let report = cmd_simulate(cfg, &dir)?;
            if cli.json {
                emit(&report)?;
            } else {
                println!("wrote {} and {}", dir.join("snapshots.csv").display(), dir.join("stats.json").display());
                summarize(&report);
            }
        }
        Command::Validate { inject_fault } => {
            let fault = inject_fault.as_deref().map(str::parse::<Fault>).transpose()?;
            let report = run_validation(cfg, fault)?;
            write_json(create_file(&dir, "validate.json")?, &report)?;
            if cli.json {
                emit(&report)?;
            } else {
                for c in &report.checks {
                    println!("{c}");
                }
                let failed = report.checks.iter().filter(|c| !c.passed).count();
                println!("{} checks, {failed} failed", report.checks.len());
            }
            return Ok(report.exit_code());
        }
        Command::Reproduce => {
            let mut outputs = Vec::new();
            for preset in Preset::ALL {
                let mut c = cfg.clone();
                c.set_preset(preset);
                let sub = dir.join(preset.name());
                cmd_fields(&c, &sub)?;
                let report = cmd_simulate(&c, &sub)?;
                let d = |a: Species, b: Species| report.distance_at_end(a, b);
                outputs.push(json!({
                    "preset": preset.name(),
                    "dir": sub,
                    "maxEnergyDrift": report.max_energy_drift,
                    "finalDistanceLupLdown": d(Species::ALL[0], Species::ALL[1]),
                    "finalDistanceRupLup": d(Species::ALL[2], Species::ALL[0]),
                }));
                if !cli.json {
                    println!("[{preset}] wrote {}", sub.display());
                    summarize(&report);
                }
            }
            if cli.json {
                emit(&outputs)?;
            }
        }
    }
    Ok(0)
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let cfg = match resolve_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    let outcome = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli, &cfg)),
            Err(e) => {
                eprintln!("error: cannot start thread pool: {e}");
                return 1;
            }
        },
        None => execute(&cli, &cfg),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
