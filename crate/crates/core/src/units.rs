//! Species tags and the dimensionless unit system.
//!
//! Simulation units set ħ = 1, the length unit to the lower-transition
//! wavelength λ and the mass unit to the molecular mass m. The time unit is
//! then T₀ = m λ² / ħ, momenta are measured in ħ/λ and energies in ħ²/(mλ²).
//! In these units k₁₂ = 2π and m = 1 exactly.
//!
//! Nothing downstream of [`normalize`] sees an SI quantity.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Proton mass, kg (CODATA 2018).
pub const PROTON_MASS: f64 = 1.672_621_923_69e-27;

/// Minimum ratio between successive scales for the large-detuning regime
/// |Δ| ≫ |Ω₁₃| ~ |Ω₂₃| ≫ |Ω₁₂|.
pub const REGIME_RATIO: f64 = 10.0;

/// Handedness of a molecule. Only the sign of the Ω₁₂ coupling differs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Chirality {
    Left,
    Right,
}

impl Chirality {
    pub const ALL: [Chirality; 2] = [Chirality::Left, Chirality::Right];

    /// +1 for left-handed, −1 for right-handed molecules.
    pub fn sign(self) -> f64 {
        match self {
            Chirality::Left => 1.0,
            Chirality::Right => -1.0,
        }
    }

    pub fn mirror(self) -> Self {
        match self {
            Chirality::Left => Chirality::Right,
            Chirality::Right => Chirality::Left,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Chirality::Left => "L",
            Chirality::Right => "R",
        }
    }
}

/// Free-function form of [`Chirality::sign`].
pub fn chirality_sign(c: Chirality) -> f64 {
    c.sign()
}

/// Pseudo-spin. `Up` is the upper dressed state |χ₁⟩, `Down` is |χ₂⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const ALL: [Spin; 2] = [Spin::Up, Spin::Down];

    /// Index into `[up, down]` arrays.
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    /// +1 for up, −1 for down; the branch sign of λ = (Λ₁+Λ₂)/2 ± R/2.
    pub fn branch(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Spin::Up => "up",
            Spin::Down => "down",
        }
    }
}

/// A (chirality, spin) pair. Serialized as `L_up`, `L_down`, `R_up`, `R_down`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Species {
    pub chirality: Chirality,
    pub spin: Spin,
}

impl Species {
    pub const ALL: [Species; 4] = [
        Species::new(Chirality::Left, Spin::Up),
        Species::new(Chirality::Left, Spin::Down),
        Species::new(Chirality::Right, Spin::Up),
        Species::new(Chirality::Right, Spin::Down),
    ];

    pub const fn new(chirality: Chirality, spin: Spin) -> Self {
        Species { chirality, spin }
    }

    /// Same spin, opposite handedness.
    pub fn mirror(self) -> Self {
        Species::new(self.chirality.mirror(), self.spin)
    }

    /// Stable small integer used to key random substreams.
    pub fn code(self) -> u64 {
        match (self.chirality, self.spin) {
            (Chirality::Left, Spin::Up) => 0,
            (Chirality::Left, Spin::Down) => 1,
            (Chirality::Right, Spin::Up) => 2,
            (Chirality::Right, Spin::Down) => 3,
        }
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.chirality.label(), self.spin.label())
    }
}

impl FromStr for Species {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Species::ALL
            .iter()
            .copied()
            .find(|sp| sp.to_string() == s)
            .ok_or_else(|| Error::Parse(format!("unknown species `{s}` (expected L_up, L_down, R_up or R_down)")))
    }
}

impl Serialize for Species {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Species {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Physical inputs. Frequencies are angular (rad/s); beam geometry is given
/// in multiples of the wavelength.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhysicalParams {
    /// Lower-transition wavelength λ, m.
    pub wavelength: f64,
    /// Molecular mass in proton masses.
    pub mass_factor: f64,
    /// Single-photon detuning Δ, rad/s.
    pub detuning: f64,
    /// Peak Rabi frequencies Ω⁰₁₂, Ω⁰₁₃, Ω⁰₂₃, rad/s.
    pub rabi_12: f64,
    pub rabi_13: f64,
    pub rabi_23: f64,
    /// Beam widths σ₁₂, σ₁₃, σ₂₃ in units of λ.
    pub sigma_12: f64,
    pub sigma_13: f64,
    pub sigma_23: f64,
    /// Beam offset Δx in units of λ (x₁₃ = +Δx, x₂₃ = −Δx).
    pub beam_offset: f64,
    /// Wavevectors of the 1–3 and 2–3 beams in units of k₁₂.
    pub k13_ratio: f64,
    pub k23_ratio: f64,
    /// Gravitational acceleration, m/s², along +z.
    pub gravity: f64,
    /// Initial cloud width σ_r in units of λ.
    pub ensemble_width: f64,
}

impl PhysicalParams {
    /// Every hard-invariant violation as (field, message).
    pub fn problems(&self) -> Vec<(&'static str, String)> {
        let mut problems = Vec::new();
        let positive = [
            ("wavelength", self.wavelength),
            ("massFactor", self.mass_factor),
            ("sigma12", self.sigma_12),
            ("sigma13", self.sigma_13),
            ("sigma23", self.sigma_23),
            ("sigmaR", self.ensemble_width),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                problems.push((name, format!("must be positive and finite (got {v})")));
            }
        }
        if !(self.detuning.is_finite() && self.detuning != 0.0) {
            problems.push(("detuning", format!("must be finite and nonzero (got {})", self.detuning)));
        }
        let finite = [
            ("rabi12", self.rabi_12),
            ("rabi13", self.rabi_13),
            ("rabi23", self.rabi_23),
            ("beamOffset", self.beam_offset),
            ("k13", self.k13_ratio),
            ("k23", self.k23_ratio),
            ("gravity", self.gravity),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                problems.push((name, format!("must be finite (got {v})")));
            }
        }
        problems
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems.into_iter().map(|(f, m)| format!("{f} {m}")).collect()))
        }
    }

    /// Whether |Δ| ≫ |Ω⁰₁₃| ~ |Ω⁰₂₃| ≫ |Ω⁰₁₂| holds with ratios ≥ [`REGIME_RATIO`].
    pub fn large_detuning_regime(&self) -> bool {
        regime_holds(self.detuning, self.rabi_12, self.rabi_13, self.rabi_23)
    }

    /// SI time unit T₀ = m λ² / ħ.
    pub fn time_unit(&self) -> f64 {
        self.mass_factor * PROTON_MASS * self.wavelength * self.wavelength / HBAR
    }
}

fn regime_holds(detuning: f64, r12: f64, r13: f64, r23: f64) -> bool {
    let strong = r13.abs().max(r23.abs());
    let weak_side = r13.abs().min(r23.abs());
    detuning.abs() >= REGIME_RATIO * strong && weak_side >= REGIME_RATIO * r12.abs()
}

/// Parameters in simulation units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedParams {
    /// Always 2π.
    pub k12: f64,
    pub k13: f64,
    pub k23: f64,
    /// Always 1.
    pub mass: f64,
    pub detuning: f64,
    pub rabi_12: f64,
    pub rabi_13: f64,
    pub rabi_23: f64,
    pub sigma_12: f64,
    pub sigma_13: f64,
    pub sigma_23: f64,
    pub beam_offset: f64,
    pub gravity: f64,
    pub sigma_r: f64,
    /// T₀ in seconds; reporting only.
    pub time_unit: f64,
    /// λ in metres and the mass factor, kept so results can be reported in SI.
    pub wavelength_si: f64,
    pub mass_factor: f64,
    pub large_detuning_regime: bool,
}

/// Converts SI inputs into simulation units.
pub fn normalize(p: &PhysicalParams) -> Result<NormalizedParams> {
    p.validate()?;
    let t0 = p.time_unit();
    let k12 = 2.0 * PI;
    Ok(NormalizedParams {
        k12,
        k13: p.k13_ratio * k12,
        k23: p.k23_ratio * k12,
        mass: 1.0,
        detuning: p.detuning * t0,
        rabi_12: p.rabi_12 * t0,
        rabi_13: p.rabi_13 * t0,
        rabi_23: p.rabi_23 * t0,
        sigma_12: p.sigma_12,
        sigma_13: p.sigma_13,
        sigma_23: p.sigma_23,
        beam_offset: p.beam_offset,
        gravity: p.gravity * t0 * t0 / p.wavelength,
        sigma_r: p.ensemble_width,
        time_unit: t0,
        wavelength_si: p.wavelength,
        mass_factor: p.mass_factor,
        large_detuning_regime: p.large_detuning_regime(),
    })
}

impl NormalizedParams {
    /// Inverse of [`normalize`].
    pub fn denormalize(&self) -> PhysicalParams {
        let t0 = self.time_unit;
        PhysicalParams {
            wavelength: self.wavelength_si,
            mass_factor: self.mass_factor,
            detuning: self.detuning / t0,
            rabi_12: self.rabi_12 / t0,
            rabi_13: self.rabi_13 / t0,
            rabi_23: self.rabi_23 / t0,
            sigma_12: self.sigma_12,
            sigma_13: self.sigma_13,
            sigma_23: self.sigma_23,
            beam_offset: self.beam_offset,
            k13_ratio: self.k13 / self.k12,
            k23_ratio: self.k23 / self.k12,
            gravity: self.gravity * self.wavelength_si / (t0 * t0),
            ensemble_width: self.sigma_r,
        }
    }

    /// Converts a simulation time to milliseconds.
    pub fn to_millis(&self, t: f64) -> f64 {
        t * self.time_unit * 1e3
    }

    /// Ω⁰₁₃Ω⁰₂₃/Δ̃, the scale of the second-order coupling.
    pub fn two_photon_coupling(&self) -> f64 {
        self.rabi_13 * self.rabi_23 / self.detuning
    }
}
