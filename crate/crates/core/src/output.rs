//! CSV and JSON writers for field tables, ensemble snapshots and run
//! statistics. Every float is written with 17 significant digits so values
//! round-trip exactly.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::{Grid, RunConfig};
use crate::ensemble::{separation_stats, ExperimentResult, SeparationStats, SpeciesDiagnostics};
use crate::error::{Error, Result};
use crate::gauge::{GaugePoint, ScalarConvention};
use crate::model::FieldModel;
use crate::units::{Chirality, NormalizedParams, PhysicalParams, Species};

pub const FIELDS_HEADER: [&str; 10] =
    ["x", "chirality", "A_up", "A_down", "V_up", "V_down", "B_up", "B_down", "theta", "dtheta_dx"];

pub const SNAPSHOTS_HEADER: [&str; 8] = ["time", "time_ms", "species", "particle_id", "x", "z", "px", "pz"];

/// Round-trip float formatting: 17 significant digits in scientific form.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One row of the field table. A is in units of k₁₂, B in units of k₁₂².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRow {
    pub x: f64,
    pub chirality: Chirality,
    pub a: [f64; 2],
    pub v: [f64; 2],
    pub b: [f64; 2],
    pub theta: f64,
    pub dtheta_dx: f64,
}

impl FieldRow {
    pub fn at(model: &FieldModel, x: f64, chirality: Chirality) -> Self {
        let k = model.k12();
        let g = GaugePoint::at(model, x, chirality, 0.0);
        FieldRow {
            x,
            chirality,
            a: [g.a_z[0] / k, g.a_z[1] / k],
            v: g.v,
            b: [g.b_y[0] / (k * k), g.b_y[1] / (k * k)],
            theta: g.theta,
            dtheta_dx: g.dtheta_dx,
        }
    }

    fn record(&self) -> Vec<String> {
        let mut r = vec![fmt_f64(self.x), self.chirality.label().to_string()];
        r.extend([self.a[0], self.a[1], self.v[0], self.v[1], self.b[0], self.b[1], self.theta, self.dtheta_dx].map(fmt_f64));
        r
    }
}

/// Field table over a grid, x-major with L before R at each x.
pub fn field_rows(model: &FieldModel, grid: &Grid) -> Vec<FieldRow> {
    grid.positions()
        .into_iter()
        .flat_map(|x| Chirality::ALL.map(|c| FieldRow::at(model, x, c)))
        .collect()
}

pub fn write_fields<W: Write>(out: W, rows: &[FieldRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FIELDS_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush().map_err(|e| Error::io("flushing fields table", e))?;
    Ok(())
}

pub fn write_snapshots<W: Write>(out: W, result: &ExperimentResult, params: &NormalizedParams) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SNAPSHOTS_HEADER)?;
    for snap in &result.snapshots {
        let t = fmt_f64(snap.time);
        let ms = fmt_f64(params.to_millis(snap.time));
        for r in &snap.records {
            let s = r.state;
            w.write_record([
                t.clone(),
                ms.clone(),
                r.species.to_string(),
                r.particle_id.to_string(),
                fmt_f64(s.x),
                fmt_f64(s.z),
                fmt_f64(s.px),
                fmt_f64(s.pz),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("flushing snapshots", e))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunMetadata {
    pub preset: Option<String>,
    pub seed: u64,
    pub particles_per_species: usize,
    pub common_cloud: bool,
    pub scalar_convention: ScalarConvention,
    pub fields_off: bool,
    pub dt: f64,
    pub t_final: f64,
    pub time_unit_seconds: f64,
    pub physical: PhysicalParams,
    pub normalized: NormalizedParams,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StatsReport {
    pub metadata: RunMetadata,
    pub snapshots: Vec<SeparationStats>,
    pub diagnostics: BTreeMap<String, SpeciesDiagnostics>,
    pub max_energy_drift: f64,
    pub max_adiabatic_ratio: f64,
}

impl StatsReport {
    pub fn new(cfg: &RunConfig, params: &NormalizedParams, result: &ExperimentResult) -> Self {
        let metadata = RunMetadata {
            preset: cfg.preset.map(|p| p.name().to_string()),
            seed: cfg.ensemble.seed,
            particles_per_species: cfg.ensemble.particles_per_species,
            common_cloud: cfg.ensemble.common_cloud,
            scalar_convention: cfg.scalar_convention,
            fields_off: cfg.fields_off,
            dt: cfg.integrator.dt,
            t_final: cfg.integrator.t_final,
            time_unit_seconds: params.time_unit,
            physical: cfg.physical.clone(),
            normalized: params.clone(),
            warnings: cfg.warnings.clone(),
        };
        let diagnostics: BTreeMap<String, SpeciesDiagnostics> =
            result.diagnostics.iter().map(|(s, d)| (s.to_string(), *d)).collect();
        let max_energy_drift = diagnostics.values().map(|d| d.max_energy_drift).fold(0.0, f64::max);
        let max_adiabatic_ratio = diagnostics.values().map(|d| d.max_adiabatic_ratio).fold(0.0, f64::max);
        StatsReport {
            metadata,
            snapshots: result.snapshots.iter().map(separation_stats).collect(),
            diagnostics,
            max_energy_drift,
            max_adiabatic_ratio,
        }
    }

    pub fn final_stats(&self) -> Option<&SeparationStats> {
        self.snapshots.last()
    }

    pub fn distance_at_end(&self, a: Species, b: Species) -> Option<f64> {
        self.final_stats().and_then(|s| s.distance(a, b))
    }
}

pub fn write_json<T: Serialize, W: Write>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(|e| Error::io("writing JSON", e))?;
    Ok(())
}

/// Opens `dir/name` for buffered writing, creating `dir` if needed.
pub fn create_file(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let path = dir.join(name);
    let f = File::create(&path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    Ok(BufWriter::new(f))
}
