//! Self-check suite: each check compares a production code path against an
//! independent oracle and reports the measured value next to its tolerance.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::dynamics::{integrate, propagate, IntegratorConfig, PhaseSpaceState};
use crate::ensemble::{run_experiment, sample_initial, EnsembleConfig};
use crate::error::{Error, Result};
use crate::gauge::{spin_fields, GaugePoint};
use crate::model::FieldModel;
use crate::reduction::{energy_shifts, reduction_error, LocalCoupling};
use crate::units::{Chirality, Species, Spin};

pub const GAUGE_IDENTITY_TOL: f64 = 1e-12;
pub const GAUGE_IDENTITY_POINTS: usize = 10_000;
pub const REDUCTION_TOL: f64 = 1e-3;
pub const REDUCTION_POINTS: usize = 100;
pub const REDUCTION_DOUBLING_MIN: f64 = 2.0;
pub const FD_STEP: f64 = 1e-4;
pub const FD_TOL: f64 = 1e-6;
pub const FD_POINTS: usize = 100;
pub const FREE_FALL_TOL: f64 = 1e-10;
pub const RK4_RATIO_RANGE: (f64, f64) = (12.0, 20.0);
pub const ENERGY_DRIFT_TOL: f64 = 1e-7;
pub const ENERGY_DRIFT_HORIZON: f64 = 2.0;
pub const ENERGY_DRIFT_DT: f64 = 1e-4;

/// Deliberate defects for exercising the suite itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Reports A↑ with the wrong sign.
    FlipVectorPotential,
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flip-a" | "flip-vector-potential" => Ok(Fault::FlipVectorPotential),
            other => Err(Error::Parse(format!("unknown fault `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// measured ≤ tolerance
    Max,
    /// measured ≥ tolerance
    Min,
    /// tolerance ≤ measured ≤ upper
    Range,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub bound: Bound,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    pub detail: String,
}

impl CheckResult {
    fn max(name: &str, measured: f64, tol: f64, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed: measured <= tol,
            measured,
            bound: Bound::Max,
            tolerance: tol,
            upper: None,
            detail,
        }
    }

    fn min(name: &str, measured: f64, tol: f64, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed: measured >= tol,
            measured,
            bound: Bound::Min,
            tolerance: tol,
            upper: None,
            detail,
        }
    }

    fn range(name: &str, measured: f64, (lo, hi): (f64, f64), detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed: (lo..=hi).contains(&measured),
            measured,
            bound: Bound::Range,
            tolerance: lo,
            upper: Some(hi),
            detail,
        }
    }

    fn failed(name: &str, err: &Error) -> Self {
        CheckResult {
            name: name.into(),
            passed: false,
            measured: f64::NAN,
            bound: Bound::Max,
            tolerance: 0.0,
            upper: None,
            detail: format!("error: {err}"),
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let bound = match self.bound {
            Bound::Max => format!("<= {:.3e}", self.tolerance),
            Bound::Min => format!(">= {:.3e}", self.tolerance),
            Bound::Range => format!("in [{}, {}]", self.tolerance, self.upper.unwrap_or(f64::NAN)),
        };
        write!(f, "{verdict} {:<22} measured {:.6e} {bound}  ({})", self.name, self.measured, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// A↑ + A↓ + k₁₂ (in k₁₂ units) and B↑ + B↓ (in k₁₂² units) at 10⁴ points.
pub fn check_gauge_identity(model: &FieldModel, fault: Option<Fault>) -> CheckResult {
    let k = model.k12();
    let n = GAUGE_IDENTITY_POINTS / 2;
    let mut worst_a = 0.0f64;
    let mut worst_b = 0.0f64;
    for i in 0..n {
        let x = -30.0 + 60.0 * i as f64 / (n - 1) as f64;
        for c in Chirality::ALL {
            let g = GaugePoint::at(model, x, c, 0.0);
            let a_up = match fault {
                Some(Fault::FlipVectorPotential) => -g.a_z[0],
                None => g.a_z[0],
            };
            worst_a = worst_a.max(((a_up + g.a_z[1]) / k + 1.0).abs());
            worst_b = worst_b.max(((g.b_y[0] + g.b_y[1]) / (k * k)).abs());
        }
    }
    CheckResult::max(
        "gauge_identity",
        worst_a.max(worst_b),
        GAUGE_IDENTITY_TOL,
        format!("{} points; max|A_up+A_down+1| {worst_a:.2e}, max|B_up+B_down| {worst_b:.2e}", 2 * n),
    )
}

/// Sample points for the reduction checks: x in [−10, 10], z in [−1, 1].
fn reduction_points(seed: u64) -> Vec<(f64, f64, Chirality)> {
    let mut r = rng(seed ^ 0x5245_4455);
    (0..REDUCTION_POINTS)
        .map(|i| (r.random_range(-10.0..10.0), r.random_range(-1.0..1.0), Chirality::ALL[i % 2]))
        .collect()
}

/// Largest |λⱼ − exact| / |Λ₁| over 100 points.
pub fn check_reduction_accuracy(model: &FieldModel, seed: u64) -> CheckResult {
    let mut worst = 0.0f64;
    for (x, z, c) in reduction_points(seed) {
        let (l1, _) = energy_shifts(model, x);
        let (e1, e2) = reduction_error(model, x, z, c);
        worst = worst.max(e1.max(e2) / l1.abs());
    }
    CheckResult::max("reduction_accuracy", worst, REDUCTION_TOL, format!("{REDUCTION_POINTS} points, relative to |Lambda1|"))
}

/// Smallest per-point ratio ε(Δ)/ε(2Δ) with all Rabi amplitudes held fixed.
pub fn check_reduction_scaling(model: &FieldModel, seed: u64) -> CheckResult {
    let mut doubled = model.clone();
    doubled.detuning *= 2.0;
    let mut worst = f64::INFINITY;
    for (x, z, c) in reduction_points(seed) {
        let (a1, a2) = reduction_error(model, x, z, c);
        let (b1, b2) = reduction_error(&doubled, x, z, c);
        worst = worst.min(a1.max(a2) / b1.max(b2));
    }
    CheckResult::min(
        "reduction_scaling",
        worst,
        REDUCTION_DOUBLING_MIN,
        format!("min over {REDUCTION_POINTS} points of err(Delta)/err(2 Delta)"),
    )
}

/// Random points where θ is smooth on the finite-difference stencil and the
/// two dressed levels are well separated.
fn smooth_points(model: &FieldModel, seed: u64) -> Vec<(f64, Chirality)> {
    let mut r = rng(seed ^ 0x4644);
    let mut pts = Vec::with_capacity(FD_POINTS);
    while pts.len() < FD_POINTS {
        let x: f64 = r.random_range(-15.0..15.0);
        let c = if r.random_bool(0.5) { Chirality::Left } else { Chirality::Right };
        let lc = LocalCoupling::at(model, x, c);
        let scale = lc.shifts.0.abs().max(lc.shifts.1.abs()).max(lc.coupling[0].abs());
        let tp = GaugePoint::at(model, x + FD_STEP, c, 0.0).theta;
        let tm = GaugePoint::at(model, x - FD_STEP, c, 0.0).theta;
        if lc.gap() > 1e-3 * scale && (tp - tm).abs() < 0.1 {
            pts.push((x, c));
        }
    }
    pts
}

fn rel(fd: f64, an: f64) -> f64 {
    let d = (fd - an).abs();
    if d == 0.0 {
        0.0
    } else {
        d / an.abs().max(fd.abs())
    }
}

/// ∂ₓθ and B_y = −∂ₓA_z against central differences with h = 10⁻⁴.
pub fn check_gradients(model: &FieldModel, seed: u64) -> CheckResult {
    let h = FD_STEP;
    let k = model.k12();
    let mut worst_t = 0.0f64;
    let mut worst_b = 0.0f64;
    for (x, c) in smooth_points(model, seed) {
        let g = GaugePoint::at(model, x, c, 0.0);
        let p = GaugePoint::at(model, x + h, c, 0.0);
        let m = GaugePoint::at(model, x - h, c, 0.0);
        worst_t = worst_t.max(rel((p.theta - m.theta) / (2.0 * h), g.dtheta_dx));
        for s in 0..2 {
            let fd = -(p.a_z[s] - m.a_z[s]) / (2.0 * h);
            worst_b = worst_b.max(rel(fd / (k * k), g.b_y[s] / (k * k)));
        }
    }
    CheckResult::max(
        "gradient_fd",
        worst_t.max(worst_b),
        FD_TOL,
        format!("{FD_POINTS} points, h={FD_STEP}; dtheta {worst_t:.2e}, B_y {worst_b:.2e}"),
    )
}

/// ∂ₓV and ∂ₓA_z as used by the force against central differences.
pub fn check_force(model: &FieldModel, seed: u64) -> CheckResult {
    let h = FD_STEP;
    let mut worst_v = 0.0f64;
    let mut worst_a = 0.0f64;
    for (x, c) in smooth_points(model, seed ^ 1) {
        for spin in Spin::ALL {
            let f = spin_fields(model, x, c, spin);
            let p = spin_fields(model, x + h, c, spin);
            let m = spin_fields(model, x - h, c, spin);
            worst_v = worst_v.max(rel((p.v - m.v) / (2.0 * h), f.dv));
            worst_a = worst_a.max(rel((p.a_z - m.a_z) / (2.0 * h), f.da_z));
        }
    }
    CheckResult::max(
        "force_fd",
        worst_v.max(worst_a),
        FD_TOL,
        format!("{FD_POINTS} points x 2 spins; dV {worst_v:.2e}, dA {worst_a:.2e}"),
    )
}

/// With the fields off z(t) = ½G̃t² and x(t) = x₀ + p_x t/m.
pub fn check_free_fall(model: &FieldModel) -> CheckResult {
    let free = model.clone().without_fields();
    let cfg = IntegratorConfig::default();
    let s0 = PhaseSpaceState::new(0.7, 0.0, 0.3, 0.0);
    let sp = Species::ALL[0];
    let tr = match integrate(s0, sp, &free, &cfg) {
        Ok(t) => t,
        Err(e) => return CheckResult::failed("free_fall", &e),
    };
    let mut worst = 0.0f64;
    for &(t, s) in &tr.snapshots {
        if t == 0.0 {
            continue;
        }
        let z = 0.5 * free.gravity * t * t;
        let x = s0.x + s0.px * t / free.mass;
        worst = worst.max(((s.z - z) / z).abs()).max(((s.x - x) / x).abs());
    }
    CheckResult::max("free_fall", worst, FREE_FALL_TOL, format!("relative error at {} snapshots", tr.snapshots.len() - 1))
}

/// e(dt)/e(dt/2) for one trajectory in the full fields, against a
/// dt/64 reference.
pub fn rk4_error_ratio(model: &FieldModel) -> Result<f64> {
    let s0 = PhaseSpaceState::new(1.5, 0.0, 0.0, 0.0);
    let sp = Species::ALL[0];
    let t = 1.0;
    let dt = 0.02;
    let run = |h: f64| propagate(s0, sp, model, h, (t / h).round() as u64);
    let reference = run(dt / 64.0)?;
    let e1 = run(dt)?.max_abs_diff(&reference);
    let e2 = run(dt / 2.0)?.max_abs_diff(&reference);
    Ok(e1 / e2)
}

pub fn check_rk4_order(model: &FieldModel) -> CheckResult {
    match rk4_error_ratio(model) {
        Ok(r) => CheckResult::range("rk4_order", r, RK4_RATIO_RANGE, "global error ratio under dt halving, dt=0.02, t=1".into()),
        Err(e) => CheckResult::failed("rk4_order", &e),
    }
}

/// Relative energy drift over t = 2 at dt = 10⁻⁴ for a few sampled particles
/// of every species.
pub fn check_energy_drift(model: &FieldModel, seed: u64) -> CheckResult {
    let ens = EnsembleConfig { particles_per_species: 4, seed, ..Default::default() };
    let cfg = IntegratorConfig {
        dt: ENERGY_DRIFT_DT,
        t_final: ENERGY_DRIFT_HORIZON,
        snapshot_times: vec![0.0, ENERGY_DRIFT_HORIZON],
    };
    let mut worst = 0.0f64;
    for (sp, states) in sample_initial(&ens) {
        for s0 in states {
            match integrate(s0, sp, model, &cfg) {
                Ok(tr) => worst = worst.max(tr.energy.max_drift),
                Err(e) => return CheckResult::failed("energy_drift", &e),
            }
        }
    }
    CheckResult::max("energy_drift", worst, ENERGY_DRIFT_TOL, "16 particles, t=2, dt=1e-4".into())
}

/// Number of mismatched coordinates between a run and its mirror image
/// (Ω⁰₁₂ → −Ω⁰₁₂ with L ↔ R relabelled).
pub fn mirror_mismatches(model: &FieldModel, ens: &EnsembleConfig, integ: &IntegratorConfig) -> Result<usize> {
    let a = run_experiment(model, ens, integ)?;
    let b = run_experiment(&model.with_flipped_rabi_12(), ens, integ)?;
    let mut bad = 0;
    for (sa, sb) in a.snapshots.iter().zip(&b.snapshots) {
        for ra in &sa.records {
            let rb = sb
                .records
                .iter()
                .find(|r| r.species == ra.species.mirror() && r.particle_id == ra.particle_id);
            match rb {
                Some(rb) => {
                    let (p, q) = (ra.state, rb.state);
                    bad += [(p.x, q.x), (p.z, q.z), (p.px, q.px), (p.pz, q.pz)]
                        .iter()
                        .filter(|(u, v)| u.to_bits() != v.to_bits())
                        .count();
                }
                None => bad += 4,
            }
        }
    }
    Ok(bad)
}

pub fn check_mirror(model: &FieldModel, seed: u64) -> CheckResult {
    let ens = EnsembleConfig { particles_per_species: 16, seed, ..Default::default() };
    let integ = IntegratorConfig { dt: 1e-3, t_final: 0.5, snapshot_times: vec![0.0, 0.25, 0.5] };
    match mirror_mismatches(model, &ens, &integ) {
        Ok(n) => CheckResult::max("mirror_symmetry", n as f64, 0.0, "mismatched coordinates, bitwise, 16 per species".into()),
        Err(e) => CheckResult::failed("mirror_symmetry", &e),
    }
}

/// Runs every check against the configuration's field model.
pub fn run_validation(cfg: &RunConfig, fault: Option<Fault>) -> Result<ValidationReport> {
    let model = cfg.model()?;
    let seed = cfg.ensemble.seed;
    let checks = vec![
        check_gauge_identity(&model, fault),
        check_reduction_accuracy(&model, seed),
        check_reduction_scaling(&model, seed),
        check_gradients(&model, seed),
        check_force(&model, seed),
        check_free_fall(&model),
        check_rk4_order(&model),
        check_energy_drift(&model, seed),
        check_mirror(&model, seed),
    ];
    Ok(ValidationReport { passed: checks.iter().all(|c| c.passed), fault, checks })
}
