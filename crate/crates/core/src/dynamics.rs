//! Classical centre-of-mass motion in the induced gauge fields.
//!
//! The equations of motion follow from
//! H = [p_x² + (p_z − A_z(x))²]/2m + V(x) − m G z,
//! so with time-independent fields H is conserved and serves as an accuracy
//! diagnostic for the fixed-step integrator.

use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{spin_fields, SpinFields};
use crate::model::FieldModel;
use crate::units::Species;

/// Canonical phase-space point in the x–z plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseSpaceState {
    pub x: f64,
    pub z: f64,
    pub px: f64,
    pub pz: f64,
}

impl PhaseSpaceState {
    pub fn new(x: f64, z: f64, px: f64, pz: f64) -> Self {
        PhaseSpaceState { x, z, px, pz }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.z.is_finite() && self.px.is_finite() && self.pz.is_finite()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.z - other.z).abs())
            .max((self.px - other.px).abs())
            .max((self.pz - other.pz).abs())
    }
}

impl Add for PhaseSpaceState {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        PhaseSpaceState::new(self.x + o.x, self.z + o.z, self.px + o.px, self.pz + o.pz)
    }
}

impl Mul<PhaseSpaceState> for f64 {
    type Output = PhaseSpaceState;

    fn mul(self, s: PhaseSpaceState) -> PhaseSpaceState {
        PhaseSpaceState::new(self * s.x, self * s.z, self * s.px, self * s.pz)
    }
}

/// Time derivative of the state for one species:
/// ẋ = p_x/m, ż = (p_z − A_z)/m, ṗ_z = mG,
/// ṗ_x = [(∂ₓA_z) p_z − A_z ∂ₓA_z]/m − ∂ₓV.
pub fn eom_rhs(s: &PhaseSpaceState, species: Species, model: &FieldModel) -> PhaseSpaceState {
    rhs_with(s, &spin_fields(model, s.x, species.chirality, species.spin), model)
}

fn rhs_with(s: &PhaseSpaceState, f: &SpinFields, model: &FieldModel) -> PhaseSpaceState {
    let m = model.mass;
    PhaseSpaceState {
        x: s.px / m,
        z: (s.pz - f.a_z) / m,
        px: (f.da_z * s.pz - f.a_z * f.da_z) / m - f.dv,
        pz: m * model.gravity,
    }
}

/// Conserved energy [p_x² + (p_z − A_z)²]/2m + V − mGz.
pub fn energy(s: &PhaseSpaceState, species: Species, model: &FieldModel) -> f64 {
    let f = spin_fields(model, s.x, species.chirality, species.spin);
    let m = model.mass;
    let kin = s.pz - f.a_z;
    (s.px * s.px + kin * kin) / (2.0 * m) + f.v - m * model.gravity * s.z
}

/// Energy and adiabaticity ratio from already evaluated fields.
fn diagnostics(s: &PhaseSpaceState, f: &SpinFields, model: &FieldModel) -> (f64, f64) {
    let m = model.mass;
    let (vx, vz) = (s.px / m, (s.pz - f.a_z) / m);
    let e = 0.5 * m * (vx * vx + vz * vz) + f.v - m * model.gravity * s.z;
    let speed = (vx * vx + vz * vz).sqrt();
    let eta = if speed == 0.0 { 0.0 } else { speed * f.connection_over_gap };
    (e, eta)
}

/// One classical fourth-order Runge–Kutta step. A negative `dt` integrates
/// backwards in time.
pub fn rk4_step<F>(s: &PhaseSpaceState, dt: f64, rhs: F) -> Result<PhaseSpaceState>
where
    F: Fn(&PhaseSpaceState) -> PhaseSpaceState,
{
    if dt == 0.0 {
        return Ok(*s);
    }
    let next = rk4_from(s, rhs(s), dt, rhs);
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::NonFinite { time: f64::NAN })
    }
}

/// RK4 step with the first stage already evaluated.
fn rk4_from<F>(s: &PhaseSpaceState, k1: PhaseSpaceState, dt: f64, rhs: F) -> PhaseSpaceState
where
    F: Fn(&PhaseSpaceState) -> PhaseSpaceState,
{
    let k2 = rhs(&(*s + (0.5 * dt) * k1));
    let k3 = rhs(&(*s + (0.5 * dt) * k2));
    let k4 = rhs(&(*s + dt * k3));
    *s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Step size, horizon and output times, all in simulation time units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_final: f64,
    pub snapshot_times: Vec<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 1e-4,
            t_final: 1.25,
            snapshot_times: vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.25],
        }
    }
}

/// Relative slack when deciding whether t/dt is an integer.
const GRID_TOL: f64 = 1e-9;

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.dt.is_finite() && self.dt > 0.0) {
            problems.push(format!("integrator.dt must be positive (got {})", self.dt));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            problems.push(format!("integrator.tFinal must be non-negative (got {})", self.t_final));
        }
        if self.snapshot_times.is_empty() {
            problems.push("integrator.snapshotTimes must not be empty".into());
        }
        for w in self.snapshot_times.windows(2) {
            if w[1] <= w[0] {
                problems.push(format!("integrator.snapshotTimes must be strictly ascending ({} then {})", w[0], w[1]));
            }
            if problems.is_empty() && w[1] - w[0] < self.dt * (1.0 - GRID_TOL) {
                problems.push(format!("integrator.dt exceeds snapshot spacing {}", w[1] - w[0]));
            }
        }
        for &t in &self.snapshot_times {
            if t < 0.0 || t > self.t_final * (1.0 + GRID_TOL) {
                problems.push(format!("integrator.snapshotTimes entry {t} outside [0, tFinal]"));
            } else if self.dt > 0.0 {
                let n = t / self.dt;
                if (n - n.round()).abs() > GRID_TOL * n.max(1.0) {
                    problems.push(format!("integrator.snapshotTimes entry {t} is not a multiple of dt"));
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    pub fn total_steps(&self) -> u64 {
        (self.t_final / self.dt).round() as u64
    }

    /// Step indices at which snapshots are taken.
    pub fn snapshot_steps(&self) -> Vec<u64> {
        self.snapshot_times.iter().map(|t| (t / self.dt).round() as u64).collect()
    }
}

/// Energy bookkeeping for one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyDiagnostic {
    pub initial: f64,
    /// max_t |E(t) − E₀| / max(|E₀|, 1).
    pub max_drift: f64,
}

/// Snapshots plus diagnostics for one particle.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<(f64, PhaseSpaceState)>,
    pub energy: EnergyDiagnostic,
    /// Largest adiabaticity ratio seen along the path.
    pub max_adiabatic_ratio: f64,
}

/// Integrates one particle and records it at the configured times.
pub fn integrate(
    s0: PhaseSpaceState,
    species: Species,
    model: &FieldModel,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    let rhs = |s: &PhaseSpaceState| eom_rhs(s, species, model);
    let steps = cfg.total_steps();
    let marks = cfg.snapshot_steps();
    let fields = |s: &PhaseSpaceState| spin_fields(model, s.x, species.chirality, species.spin);
    let (e0, _) = diagnostics(&s0, &fields(&s0), model);
    let scale = e0.abs().max(1.0);

    let mut snapshots = Vec::with_capacity(marks.len());
    let mut next_mark = 0;
    let mut max_drift = 0.0f64;
    let mut max_eta = 0.0f64;
    let mut s = s0;
    for k in 0..=steps {
        let f = fields(&s);
        let (e, eta) = diagnostics(&s, &f, model);
        max_drift = max_drift.max((e - e0).abs() / scale);
        if model.gauge_coupling {
            max_eta = max_eta.max(eta);
        }
        while next_mark < marks.len() && marks[next_mark] == k {
            snapshots.push((cfg.snapshot_times[next_mark], s));
            next_mark += 1;
        }
        if k == steps {
            break;
        }
        s = rk4_from(&s, rhs_with(&s, &f, model), cfg.dt, rhs);
        if !s.is_finite() {
            return Err(Error::NonFinite { time: (k + 1) as f64 * cfg.dt });
        }
    }
    Ok(Trajectory {
        snapshots,
        energy: EnergyDiagnostic { initial: e0, max_drift },
        max_adiabatic_ratio: max_eta,
    })
}

/// Advances `steps` fixed steps without diagnostics; `dt` may be negative.
pub fn propagate(
    s0: PhaseSpaceState,
    species: Species,
    model: &FieldModel,
    dt: f64,
    steps: u64,
) -> Result<PhaseSpaceState> {
    let rhs = |s: &PhaseSpaceState| eom_rhs(s, species, model);
    let mut s = s0;
    for k in 0..steps {
        s = rk4_step(&s, dt, rhs).map_err(|_| Error::NonFinite { time: (k + 1) as f64 * dt })?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beams::{BeamTriple, GaussianBeam};
    use crate::gauge::ScalarConvention;
    use crate::units::{Chirality, Spin};
    use std::f64::consts::PI;

    fn fig3(det: f64) -> FieldModel {
        FieldModel {
            beams: BeamTriple {
                beam12: GaussianBeam::new(1e-6 * det, 0.0, 7.0, 2.0 * PI),
                beam13: GaussianBeam::new(1e-3 * det, 3.0, 10.0, 4.0 * PI),
                beam23: GaussianBeam::new(1e-3 * det, -3.0, 10.0, 2.0 * PI),
            },
            detuning: det,
            mass: 1.0,
            gravity: 24.65,
            convention: ScalarConvention::Paper,
            gauge_coupling: true,
        }
    }

    const LU: Species = Species::new(Chirality::Left, Spin::Up);

    #[test]
    fn free_fall_rhs() {
        let m = fig3(1.586e7).without_fields();
        let s = PhaseSpaceState::new(0.3, -1.0, 2.0, 5.0);
        let d = eom_rhs(&s, LU, &m);
        assert_eq!(d, PhaseSpaceState::new(2.0, 5.0, 0.0, 24.65));
    }

    #[test]
    fn uniform_vector_potential_only_shifts_z_velocity() {
        // uniform beams: A_z constant, ∂ₓA = 0, ∂ₓV = 0
        let mut m = fig3(1.586e7);
        for b in [&mut m.beams.beam12, &mut m.beams.beam13, &mut m.beams.beam23] {
            b.width = 1e12;
        }
        let s = PhaseSpaceState::new(0.5, 0.0, 0.0, 3.0);
        let f = spin_fields(&m, 0.5, Chirality::Left, Spin::Up);
        let d = eom_rhs(&s, LU, &m);
        assert!(d.px.abs() < 1e-12);
        assert_eq!(d.z, 3.0 - f.a_z);
    }

    #[test]
    fn force_is_minus_hamiltonian_gradient() {
        let m = fig3(1.586e7);
        let h = 1e-5;
        for sp in Species::ALL {
            for x in [-3.0, -0.4, 0.8, 2.2] {
                let s = PhaseSpaceState::new(x, 1.0, 0.7, 12.0);
                let e = |x: f64| energy(&PhaseSpaceState { x, ..s }, sp, &m);
                let fd = -(e(x + h) - e(x - h)) / (2.0 * h);
                let d = eom_rhs(&s, sp, &m);
                assert!((fd - d.px).abs() < 1e-6 * (1.0 + fd.abs()), "{sp} x={x}: {fd} {}", d.px);
            }
        }
    }

    #[test]
    fn zero_step_is_identity() {
        let m = fig3(1.586e7);
        let s = PhaseSpaceState::new(0.1, 0.2, 0.3, 0.4);
        assert_eq!(rk4_step(&s, 0.0, |s| eom_rhs(s, LU, &m)).unwrap(), s);
    }

    #[test]
    fn non_finite_step_is_an_error() {
        let s = PhaseSpaceState::default();
        let r = rk4_step(&s, 0.1, |_| PhaseSpaceState::new(f64::NAN, 0.0, 0.0, 0.0));
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn free_fall_is_exact() {
        let m = fig3(1.586e7).without_fields();
        let cfg = IntegratorConfig { dt: 1e-4, t_final: 1.0, snapshot_times: vec![0.0, 1.0] };
        let tr = integrate(PhaseSpaceState::default(), LU, &m, &cfg).unwrap();
        let (t, s) = tr.snapshots[1];
        assert_eq!(t, 1.0);
        let exact = 0.5 * m.gravity;
        assert!(((s.z - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::default().validate().is_ok());
        let bad = IntegratorConfig { dt: 0.3, t_final: 1.0, snapshot_times: vec![0.0, 0.5] };
        assert!(bad.validate().is_err());
        let bad = IntegratorConfig { dt: 0.1, t_final: 1.0, snapshot_times: vec![0.5, 0.2] };
        assert!(bad.validate().is_err());
        let bad = IntegratorConfig { dt: 0.1, t_final: 1.0, snapshot_times: vec![0.0, 2.0] };
        assert!(bad.validate().is_err());
        let bad = IntegratorConfig { dt: -0.1, t_final: 1.0, snapshot_times: vec![0.0] };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn deterministic() {
        let m = fig3(1.586e7);
        let cfg = IntegratorConfig { dt: 1e-3, t_final: 0.5, snapshot_times: vec![0.0, 0.25, 0.5] };
        let s0 = PhaseSpaceState::new(1.3, -0.4, 0.0, 0.0);
        let a = integrate(s0, LU, &m, &cfg).unwrap();
        let b = integrate(s0, LU, &m, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
