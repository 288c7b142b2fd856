//! Run configuration: a strict TOML schema with built-in parameter presets.
//!
//! ```toml
//! preset = "fig3abc"            # optional; replaces the [physical] values
//! scalarConvention = "paper"    # or "standard"
//!
//! [physical]
//! wavelength = 1e-6             # m
//! massFactor = 100.0            # proton masses
//! detuning = 1e10               # rad/s
//! rabi12 = 1e4                  # rad/s
//! rabi13 = 1e7
//! rabi23 = 1e7
//! sigma12 = 7.0                 # units of wavelength
//! sigma13 = 10.0
//! sigma23 = 10.0
//! beamOffset = 3.0
//! k13 = 2.0                     # units of k12; default k12 + k23
//! k23 = 1.0
//! gravity = 9.8                 # m/s^2
//! fieldsOff = false
//!
//! [ensemble]
//! particlesPerSpecies = 1000
//! sigmaR = 3.0
//! seed = 1
//! species = ["L_up", "L_down", "R_up", "R_down"]
//! commonCloud = true
//!
//! [integrator]
//! dt = 1e-4                     # time units
//! tFinal = 1.25
//! snapshotTimes = [0.0, 0.25, 0.5, 0.75, 1.0, 1.25]
//!
//! [output]
//! dir = "out"
//! gridMin = -30.0
//! gridMax = 30.0
//! gridPoints = 601
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::IntegratorConfig;
use crate::ensemble::EnsembleConfig;
use crate::error::{Error, Result};
use crate::gauge::ScalarConvention;
use crate::model::FieldModel;
use crate::units::{normalize, NormalizedParams, PhysicalParams, Species};

/// Built-in parameter sets for the two Fig.-3 scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Ω⁰₁₂ = Ω⁰₁₃Ω⁰₂₃/Δ = 10⁻⁶Δ: spin splitting.
    Fig3abc,
    /// Ω⁰₁₂ = Ω⁰₁₃Ω⁰₂₃/Δ = 10⁻⁴Δ: chirality splitting.
    Fig3def,
}

impl Preset {
    pub const ALL: [Preset; 2] = [Preset::Fig3abc, Preset::Fig3def];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig3abc => "fig3abc",
            Preset::Fig3def => "fig3def",
        }
    }

    /// Physical parameters of the preset. Ω⁰₁₃ = Ω⁰₂₃ and Ω⁰₁₂ is set equal
    /// to Ω⁰₁₃Ω⁰₂₃/Δ.
    pub fn physical(self) -> PhysicalParams {
        let detuning = 1e10;
        let ratio = match self {
            Preset::Fig3abc => 1e-3,
            Preset::Fig3def => 1e-2,
        };
        let rabi_13 = ratio * detuning;
        let rabi_23 = rabi_13;
        PhysicalParams {
            wavelength: 1e-6,
            mass_factor: 100.0,
            detuning,
            rabi_12: rabi_13 * rabi_23 / detuning,
            rabi_13,
            rabi_23,
            sigma_12: 7.0,
            sigma_13: 10.0,
            sigma_23: 10.0,
            beam_offset: 3.0,
            k13_ratio: 2.0,
            k23_ratio: 1.0,
            gravity: 9.8,
            ensemble_width: 3.0,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig3abc" => Ok(Preset::Fig3abc),
            "fig3def" => Ok(Preset::Fig3def),
            other => Err(Error::Parse(format!("unknown preset `{other}` (expected fig3abc or fig3def)"))),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawConfig {
    preset: Option<Preset>,
    scalar_convention: Option<ScalarConvention>,
    #[serde(default)]
    physical: RawPhysical,
    #[serde(default)]
    ensemble: RawEnsemble,
    #[serde(default)]
    integrator: RawIntegrator,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawPhysical {
    wavelength: Option<f64>,
    mass_factor: Option<f64>,
    detuning: Option<f64>,
    rabi12: Option<f64>,
    rabi13: Option<f64>,
    rabi23: Option<f64>,
    sigma12: Option<f64>,
    sigma13: Option<f64>,
    sigma23: Option<f64>,
    beam_offset: Option<f64>,
    k13: Option<f64>,
    k23: Option<f64>,
    gravity: Option<f64>,
    fields_off: Option<bool>,
}

impl RawPhysical {
    /// Names of the keys that were given, for preset-conflict warnings.
    fn given(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        let entries: [(&'static str, bool); 13] = [
            ("wavelength", self.wavelength.is_some()),
            ("massFactor", self.mass_factor.is_some()),
            ("detuning", self.detuning.is_some()),
            ("rabi12", self.rabi12.is_some()),
            ("rabi13", self.rabi13.is_some()),
            ("rabi23", self.rabi23.is_some()),
            ("sigma12", self.sigma12.is_some()),
            ("sigma13", self.sigma13.is_some()),
            ("sigma23", self.sigma23.is_some()),
            ("beamOffset", self.beam_offset.is_some()),
            ("k13", self.k13.is_some()),
            ("k23", self.k23.is_some()),
            ("gravity", self.gravity.is_some()),
        ];
        for (name, present) in entries {
            if present {
                v.push(name);
            }
        }
        v
    }

    fn apply(&self, base: &mut PhysicalParams) {
        let set = |dst: &mut f64, src: Option<f64>| {
            if let Some(v) = src {
                *dst = v;
            }
        };
        set(&mut base.wavelength, self.wavelength);
        set(&mut base.mass_factor, self.mass_factor);
        set(&mut base.detuning, self.detuning);
        set(&mut base.rabi_12, self.rabi12);
        set(&mut base.rabi_13, self.rabi13);
        set(&mut base.rabi_23, self.rabi23);
        set(&mut base.sigma_12, self.sigma12);
        set(&mut base.sigma_13, self.sigma13);
        set(&mut base.sigma_23, self.sigma23);
        set(&mut base.beam_offset, self.beam_offset);
        set(&mut base.k23_ratio, self.k23);
        base.k13_ratio = self.k13.unwrap_or(1.0 + base.k23_ratio);
        set(&mut base.gravity, self.gravity);
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawEnsemble {
    particles_per_species: Option<usize>,
    sigma_r: Option<f64>,
    seed: Option<u64>,
    species: Option<Vec<Species>>,
    common_cloud: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawIntegrator {
    dt: Option<f64>,
    t_final: Option<f64>,
    snapshot_times: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawOutput {
    dir: Option<PathBuf>,
    grid_min: Option<f64>,
    grid_max: Option<f64>,
    grid_points: Option<usize>,
}

/// Uniform x grid for field tables, in units of λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { min: -30.0, max: 30.0, points: 601 }
    }
}

impl Grid {
    pub fn positions(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.min + step * i as f64).collect()
    }
}

/// Fully resolved and validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    pub physical: PhysicalParams,
    pub fields_off: bool,
    pub ensemble: EnsembleConfig,
    pub integrator: IntegratorConfig,
    pub scalar_convention: ScalarConvention,
    pub output_dir: PathBuf,
    pub grid: Grid,
    /// Non-fatal remarks gathered while resolving (e.g. keys a preset
    /// overrode, regime warnings).
    pub warnings: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::from_preset(Preset::Fig3abc)
    }
}

impl RunConfig {
    pub fn from_preset(preset: Preset) -> Self {
        let physical = preset.physical();
        let ensemble = EnsembleConfig { sigma_r: physical.ensemble_width, ..Default::default() };
        RunConfig {
            preset: Some(preset),
            physical,
            fields_off: false,
            ensemble,
            integrator: IntegratorConfig::default(),
            scalar_convention: ScalarConvention::Paper,
            output_dir: PathBuf::from("out"),
            grid: Grid::default(),
            warnings: Vec::new(),
        }
    }

    /// Re-applies a preset over the physical parameters.
    pub fn set_preset(&mut self, preset: Preset) {
        let width = self.physical.ensemble_width;
        self.physical = PhysicalParams { ensemble_width: width, ..preset.physical() };
        self.preset = Some(preset);
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.ensemble.seed = seed;
    }

    pub fn normalized(&self) -> Result<NormalizedParams> {
        normalize(&self.physical)
    }

    pub fn model(&self) -> Result<FieldModel> {
        let m = FieldModel::new(&self.normalized()?)?.with_convention(self.scalar_convention);
        Ok(if self.fields_off { m.without_fields() } else { m })
    }

    /// Checks every section and reports all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems: Vec<String> = self
            .physical
            .problems()
            .into_iter()
            .filter(|(field, _)| *field != "sigmaR")
            .map(|(field, msg)| format!("physical.{field} {msg}"))
            .collect();
        let mut collect = |r: Result<()>| {
            if let Err(Error::Validation(p)) = r {
                problems.extend(p);
            }
        };
        collect(self.ensemble.validate());
        collect(self.integrator.validate());
        if !(self.grid.points >= 1 && self.grid.min.is_finite() && self.grid.max.is_finite() && self.grid.max >= self.grid.min) {
            problems.push("output grid must have gridPoints >= 1 and gridMin <= gridMax".into());
        }
        let k12 = 1.0;
        if k12 + self.physical.k23_ratio - self.physical.k13_ratio != 0.0 {
            problems.push(format!(
                "physical.k13 violates wavevector closure: k13 must equal 1 + k23 = {} (got {})",
                1.0 + self.physical.k23_ratio,
                self.physical.k13_ratio
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

/// Parses configuration text; `origin` only labels error messages.
pub fn parse_config(text: &str, origin: &Path) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config {
        path: origin.to_path_buf(),
        problems: vec![e.message().to_string()],
    })?;
    resolve(raw).map_err(|e| match e {
        Error::Validation(problems) => Error::Config { path: origin.to_path_buf(), problems },
        other => other,
    })
}

/// Reads, defaults and validates a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.to_path_buf(),
        problems: vec![format!("cannot read: {e}")],
    })?;
    parse_config(&text, path)
}

fn resolve(raw: RawConfig) -> Result<RunConfig> {
    let mut cfg = RunConfig::from_preset(raw.preset.unwrap_or(Preset::Fig3abc));
    cfg.preset = raw.preset;
    if raw.preset.is_some() {
        let ignored = raw.physical.given();
        if !ignored.is_empty() {
            cfg.warnings.push(format!(
                "preset overrides [physical] keys: {}",
                ignored.iter().map(|k| format!("physical.{k}")).collect::<Vec<_>>().join(", ")
            ));
        }
    } else {
        raw.physical.apply(&mut cfg.physical);
    }
    cfg.fields_off = raw.physical.fields_off.unwrap_or(false);
    if let Some(c) = raw.scalar_convention {
        cfg.scalar_convention = c;
    }

    let e = raw.ensemble;
    if let Some(v) = e.particles_per_species {
        cfg.ensemble.particles_per_species = v;
    }
    if let Some(v) = e.sigma_r {
        cfg.ensemble.sigma_r = v;
        cfg.physical.ensemble_width = v;
    }
    if let Some(v) = e.seed {
        cfg.ensemble.seed = v;
    }
    if let Some(v) = e.species {
        cfg.ensemble.species = v;
    }
    if let Some(v) = e.common_cloud {
        cfg.ensemble.common_cloud = v;
    }

    let i = raw.integrator;
    if let Some(v) = i.dt {
        cfg.integrator.dt = v;
    }
    if let Some(v) = i.t_final {
        cfg.integrator.t_final = v;
    }
    if let Some(v) = i.snapshot_times {
        cfg.integrator.snapshot_times = v;
    }

    let o = raw.output;
    if let Some(v) = o.dir {
        cfg.output_dir = v;
    }
    if let Some(v) = o.grid_min {
        cfg.grid.min = v;
    }
    if let Some(v) = o.grid_max {
        cfg.grid.max = v;
    }
    if let Some(v) = o.grid_points {
        cfg.grid.points = v;
    }

    cfg.validate()?;
    if !cfg.physical.large_detuning_regime() {
        cfg.warnings.push(
            "parameters leave the large-detuning regime |Δ| ≫ |Ω13| ~ |Ω23| ≫ |Ω12| (ratio < 10)".to_string(),
        );
    }
    Ok(cfg)
}
