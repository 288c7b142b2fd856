//! Initial molecular cloud, the four-species experiment and separation
//! statistics.
//!
//! Sampling is counter-based: every particle gets its own ChaCha stream
//! position derived from (seed, stream key, particle id), so the cloud does
//! not depend on how many worker threads integrate it.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{integrate, IntegratorConfig, PhaseSpaceState};
use crate::error::{Error, Result};
use crate::model::FieldModel;
use crate::units::Species;

/// Words of ChaCha output reserved per particle. Two normal draws need a
/// handful; the rest is headroom for rejection sampling.
const WORDS_PER_PARTICLE: u128 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub particles_per_species: usize,
    /// σ_r in units of λ; the density is ∝ exp[−(x² + z²)/σ_r²].
    pub sigma_r: f64,
    pub seed: u64,
    pub species: Vec<Species>,
    /// Every species starts from the same sampled positions, so centroid
    /// differences come from the dynamics alone.
    pub common_cloud: bool,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            particles_per_species: 1000,
            sigma_r: 3.0,
            seed: 1,
            species: Species::ALL.to_vec(),
            common_cloud: true,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.particles_per_species == 0 {
            problems.push("ensemble.particlesPerSpecies must be at least 1".to_string());
        }
        if !(self.sigma_r.is_finite() && self.sigma_r > 0.0) {
            problems.push(format!("ensemble.sigmaR must be positive (got {})", self.sigma_r));
        }
        if self.species.is_empty() {
            problems.push("ensemble.species must not be empty".to_string());
        }
        for (i, s) in self.species.iter().enumerate() {
            if self.species[..i].contains(s) {
                problems.push(format!("ensemble.species lists {s} twice"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    /// Substream key for a species; one shared key for a common cloud.
    fn stream_key(&self, species: Species) -> u64 {
        if self.common_cloud {
            0
        } else {
            4 + species.code()
        }
    }
}

/// Deterministic generator for one particle.
fn particle_rng(seed: u64, stream: u64, particle: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(particle as u128 * WORDS_PER_PARTICLE);
    rng
}

/// Initial states per species: positions i.i.d. normal with standard
/// deviation σ_r/√2 per axis, momenta zero.
pub fn sample_initial(cfg: &EnsembleConfig) -> Vec<(Species, Vec<PhaseSpaceState>)> {
    let sd = cfg.sigma_r / 2f64.sqrt();
    cfg.species
        .iter()
        .map(|&sp| {
            let key = cfg.stream_key(sp);
            let states = (0..cfg.particles_per_species)
                .map(|id| {
                    let mut rng = particle_rng(cfg.seed, key, id);
                    let x: f64 = rng.sample(StandardNormal);
                    let z: f64 = rng.sample(StandardNormal);
                    PhaseSpaceState::new(sd * x, sd * z, 0.0, 0.0)
                })
                .collect();
            (sp, states)
        })
        .collect()
}

/// One particle's state at a snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotRecord {
    pub species: Species,
    pub particle_id: usize,
    pub state: PhaseSpaceState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSnapshot {
    pub time: f64,
    pub records: Vec<SnapshotRecord>,
}

/// Per-species run diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeciesDiagnostics {
    pub max_energy_drift: f64,
    pub max_adiabatic_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub snapshots: Vec<EnsembleSnapshot>,
    pub diagnostics: BTreeMap<Species, SpeciesDiagnostics>,
}

/// Releases the cloud at t = 0 and integrates every particle of every
/// configured species. Uses the ambient rayon pool.
pub fn run_experiment(model: &FieldModel, ens: &EnsembleConfig, integ: &IntegratorConfig) -> Result<ExperimentResult> {
    ens.validate()?;
    integ.validate()?;
    model.beams.require_closure()?;

    let initial = sample_initial(ens);
    let jobs: Vec<(Species, usize, PhaseSpaceState)> = initial
        .iter()
        .flat_map(|(sp, states)| states.iter().enumerate().map(move |(id, s)| (*sp, id, *s)))
        .collect();

    let trajectories = jobs
        .par_iter()
        .map(|&(sp, id, s0)| {
            integrate(s0, sp, model, integ).map_err(|e| match e {
                Error::NonFinite { time } => Error::Integration { species: sp.to_string(), particle: id, time },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut snapshots: Vec<EnsembleSnapshot> = integ
        .snapshot_times
        .iter()
        .map(|&time| EnsembleSnapshot { time, records: Vec::with_capacity(jobs.len()) })
        .collect();
    let mut diagnostics: BTreeMap<Species, SpeciesDiagnostics> = BTreeMap::new();
    for (&(species, particle_id, _), tr) in jobs.iter().zip(&trajectories) {
        for (snap, &(_, state)) in snapshots.iter_mut().zip(&tr.snapshots) {
            snap.records.push(SnapshotRecord { species, particle_id, state });
        }
        let d = diagnostics.entry(species).or_insert(SpeciesDiagnostics {
            max_energy_drift: 0.0,
            max_adiabatic_ratio: 0.0,
        });
        d.max_energy_drift = d.max_energy_drift.max(tr.energy.max_drift);
        d.max_adiabatic_ratio = d.max_adiabatic_ratio.max(tr.max_adiabatic_ratio);
    }
    Ok(ExperimentResult { snapshots, diagnostics })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesStats {
    pub species: Species,
    pub count: usize,
    /// (x̄, z̄).
    pub centroid: [f64; 2],
    /// RMS distance from the centroid.
    pub spread: f64,
    /// RMS deviation along x and z separately.
    pub spread_xz: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDistance {
    pub a: Species,
    pub b: Species,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationStats {
    pub time: f64,
    pub species: Vec<SpeciesStats>,
    pub pairwise: Vec<PairDistance>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl SeparationStats {
    pub fn get(&self, species: Species) -> Option<&SpeciesStats> {
        self.species.iter().find(|s| s.species == species)
    }

    pub fn distance(&self, a: Species, b: Species) -> Option<f64> {
        self.pairwise
            .iter()
            .find(|p| (p.a == a && p.b == b) || (p.a == b && p.b == a))
            .map(|p| p.distance)
    }
}

/// Centroids, spreads and pairwise centroid distances of one snapshot.
pub fn separation_stats(snap: &EnsembleSnapshot) -> SeparationStats {
    let mut species = Vec::new();
    let mut notes = Vec::new();
    for sp in Species::ALL {
        let pts: Vec<[f64; 2]> = snap
            .records
            .iter()
            .filter(|r| r.species == sp)
            .map(|r| [r.state.x, r.state.z])
            .collect();
        if pts.is_empty() {
            notes.push(format!("{sp}: no particles, omitted"));
            continue;
        }
        let n = pts.len() as f64;
        let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
        let cz = pts.iter().map(|p| p[1]).sum::<f64>() / n;
        let vx = pts.iter().map(|p| (p[0] - cx).powi(2)).sum::<f64>() / n;
        let vz = pts.iter().map(|p| (p[1] - cz).powi(2)).sum::<f64>() / n;
        species.push(SpeciesStats {
            species: sp,
            count: pts.len(),
            centroid: [cx, cz],
            spread: (vx + vz).sqrt(),
            spread_xz: [vx.sqrt(), vz.sqrt()],
        });
    }
    let mut pairwise = Vec::new();
    for (i, a) in species.iter().enumerate() {
        for b in &species[i + 1..] {
            pairwise.push(PairDistance {
                a: a.species,
                b: b.species,
                distance: (a.centroid[0] - b.centroid[0]).hypot(a.centroid[1] - b.centroid[1]),
            });
        }
    }
    SeparationStats { time: snap.time, species, pairwise, notes }
}
