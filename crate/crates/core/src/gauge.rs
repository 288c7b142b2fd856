//! Spin-dependent induced gauge fields.
//!
//! With Φ = −k₁₂z the dressed states depend on z only through a phase, so the
//! vector potential points along ẑ and depends on x only:
//! A↑ = −k₁₂ sin²θ, A↓ = −k₁₂ cos²θ. The effective magnetic field is the
//! single curl component B_y = −∂ₓA_z.
//!
//! Every spatial derivative here is analytic (chain rule through atan2 and
//! the Gaussian envelopes).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::FieldModel;
use crate::reduction::{mixing_angle, LocalCoupling};
use crate::units::{Chirality, Spin};

/// Which scalar potential to use.
///
/// `Paper` keeps `+|⟨χ|∇χ⟩|²` inside V, giving k₁₂² s(1+s)/2m with s = sin²θ
/// (up) or cos²θ (down). `Standard` is the usual Born–Oppenheimer form
/// (⟨∇χ|∇χ⟩ − |⟨χ|∇χ⟩|²)/2m, i.e. k₁₂² s(1−s)/2m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarConvention {
    #[default]
    Paper,
    Standard,
}

impl FromStr for ScalarConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "paper" => Ok(ScalarConvention::Paper),
            "standard" => Ok(ScalarConvention::Standard),
            other => Err(Error::Parse(format!(
                "unknown scalar convention `{other}` (expected `paper` or `standard`)"
            ))),
        }
    }
}

impl fmt::Display for ScalarConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalarConvention::Paper => "paper",
            ScalarConvention::Standard => "standard",
        })
    }
}

/// A_z for one spin: −k₁₂ sin²θ (up) or −k₁₂ cos²θ (down).
pub fn vector_potential(theta: f64, spin: Spin, k12: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    match spin {
        Spin::Up => -k12 * s * s,
        Spin::Down => -k12 * c * c,
    }
}

/// θ-dependent quantities and the first two x-derivatives of θ.
///
/// sin²θ, cos²θ and sin2θ come straight from D = Λ₁ − Λ₂, g̃ and
/// R = √(D² + 4g̃²), always through the form free of cancellation, so the
/// trajectory path never calls atan2 or tan.
#[derive(Debug, Clone, Copy)]
struct Angle {
    lc: LocalCoupling,
    gap: f64,
    sin_sq: f64,
    cos_sq: f64,
    sin_2theta: f64,
    d1: f64,
    d2: f64,
}

impl Angle {
    fn at(model: &FieldModel, x: f64, c: Chirality) -> Self {
        let lc = LocalCoupling::at(model, x, c);
        let [d, dd, ddd] = lc.split;
        let [g, dg, ddg] = lc.coupling;
        let n = d * d + 4.0 * g * g;
        if n == 0.0 {
            return Angle { lc, gap: 0.0, sin_sq: 0.0, cos_sq: 1.0, sin_2theta: 0.0, d1: 0.0, d2: 0.0 };
        }
        let r = n.sqrt();
        let (sin_sq, cos_sq) = if d >= 0.0 {
            (2.0 * g * g / (r * (r + d)), (r + d) / (2.0 * r))
        } else {
            ((r - d) / (2.0 * r), 2.0 * g * g / (r * (r - d)))
        };
        let num = d * dg - g * dd;
        let dnum = d * ddg - g * ddd;
        let dn = 2.0 * d * dd + 8.0 * g * dg;
        Angle {
            lc,
            gap: r,
            sin_sq,
            cos_sq,
            sin_2theta: 2.0 * g / r,
            d1: num / n,
            d2: (dnum * n - num * dn) / (n * n),
        }
    }

    fn theta(&self) -> f64 {
        mixing_angle(self.lc.shifts.0, self.lc.shifts.1, self.lc.coupling[0])
    }

    fn a_z(&self, spin: Spin, k12: f64) -> f64 {
        match spin {
            Spin::Up => -k12 * self.sin_sq,
            Spin::Down => -k12 * self.cos_sq,
        }
    }

    /// λ_σ and ∂ₓλ_σ. For D ≥ 0 (|θ| ≤ π/4) λ = Λ ± g̃ tanθ with
    /// g̃ tanθ = 2g̃²/(R + D); otherwise the closed form.
    fn level(&self, spin: Spin) -> (f64, f64) {
        let lc = &self.lc;
        let (l1, l2) = lc.shifts;
        let [d, dd, _] = lc.split;
        let r = self.gap;
        let (up, down) = if r == 0.0 {
            (l1, l2)
        } else if d >= 0.0 {
            let g = lc.coupling[0];
            let shift = 2.0 * g * g / (r + d);
            (l1 + shift, l2 - shift)
        } else {
            let mean = 0.5 * (l1 + l2);
            (mean + 0.5 * r, mean - 0.5 * r)
        };
        let dgap = if r == 0.0 { 0.0 } else { (d * dd + 4.0 * lc.coupling[0] * lc.coupling[1]) / r };
        match spin {
            Spin::Up => (up, 0.5 * (lc.sum[1] + dgap)),
            Spin::Down => (down, 0.5 * (lc.sum[1] - dgap)),
        }
    }
}

/// ∂ₓθ = (D ∂ₓg̃ − g̃ ∂ₓD)/(D² + 4g̃²) with D = Λ₁ − Λ₂; zero at D = g̃ = 0.
pub fn theta_gradient(model: &FieldModel, x: f64, c: Chirality) -> f64 {
    Angle::at(model, x, c).d1
}

/// Scalar potential V_σ at x (trap already released).
pub fn scalar_potential(model: &FieldModel, x: f64, c: Chirality, spin: Spin, convention: ScalarConvention) -> f64 {
    let a = Angle::at(model, x, c);
    scalar_parts(model, &a, spin, convention).0
}

/// (V, ∂ₓV).
fn scalar_parts(model: &FieldModel, a: &Angle, spin: Spin, convention: ScalarConvention) -> (f64, f64) {
    let k = model.k12();
    let (s, ds) = match spin {
        Spin::Up => (a.sin_sq, a.sin_2theta * a.d1),
        Spin::Down => (a.cos_sq, -a.sin_2theta * a.d1),
    };
    let (geo, dgeo) = match convention {
        ScalarConvention::Paper => (k * k * s * (1.0 + s), k * k * (1.0 + 2.0 * s) * ds),
        ScalarConvention::Standard => (k * k * s * (1.0 - s), k * k * (1.0 - 2.0 * s) * ds),
    };
    let (lam, dlam) = a.level(spin);
    let inv2m = 0.5 / model.mass;
    (
        lam + inv2m * (geo + a.d1 * a.d1),
        dlam + inv2m * (dgeo + 2.0 * a.d1 * a.d2),
    )
}

/// B_y = −∂ₓA_z for one spin. B↑ = k₁₂ sin2θ ∂ₓθ and B↓ = −B↑.
pub fn magnetic_field(model: &FieldModel, x: f64, spin: Spin, c: Chirality) -> f64 {
    let a = Angle::at(model, x, c);
    let up = model.k12() * a.sin_2theta * a.d1;
    match spin {
        Spin::Up => up,
        Spin::Down => -up,
    }
}

/// η = |v|·‖A₁₂‖/|λ₁ − λ₂| with ‖A₁₂‖ = √((∂ₓθ)² + (k₁₂ sin2θ / 2)²).
///
/// Small η means the pseudo-spin reduction holds along the trajectory.
/// Returns +∞ at an exact degeneracy (unless the speed is zero).
pub fn adiabaticity_ratio(model: &FieldModel, x: f64, speed: f64, c: Chirality) -> f64 {
    adiabatic_ratio_of(model, &Angle::at(model, x, c), speed)
}

fn adiabatic_ratio_of(model: &FieldModel, a: &Angle, speed: f64) -> f64 {
    if speed == 0.0 {
        return 0.0;
    }
    speed.abs() * connection_over_gap(model, a)
}

/// ‖A₁₂‖ / |λ₁ − λ₂|.
fn connection_over_gap(model: &FieldModel, a: &Angle) -> f64 {
    if a.gap == 0.0 {
        return f64::INFINITY;
    }
    let h = 0.5 * model.k12() * a.sin_2theta;
    (a.d1 * a.d1 + h * h).sqrt() / a.gap
}

/// What the equations of motion need for one spin at one x.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpinFields {
    pub a_z: f64,
    pub da_z: f64,
    pub v: f64,
    pub dv: f64,
    /// ‖A₁₂‖/|λ₁ − λ₂|; multiply by the speed to get the adiabaticity ratio.
    pub connection_over_gap: f64,
}

/// A_z, ∂ₓA_z, V and ∂ₓV for one species. All zero when the model has gauge
/// coupling switched off.
pub fn spin_fields(model: &FieldModel, x: f64, c: Chirality, spin: Spin) -> SpinFields {
    if !model.gauge_coupling {
        return SpinFields::default();
    }
    let a = Angle::at(model, x, c);
    let k = model.k12();
    let da_up = -k * a.sin_2theta * a.d1;
    let da_z = match spin {
        Spin::Up => da_up,
        Spin::Down => -da_up,
    };
    let (v, dv) = scalar_parts(model, &a, spin, model.convention);
    SpinFields {
        a_z: a.a_z(spin, k),
        da_z,
        v,
        dv,
        connection_over_gap: connection_over_gap(model, &a),
    }
}

/// Full gauge data at one x for one chirality, indexed `[up, down]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugePoint {
    pub a_z: [f64; 2],
    pub v: [f64; 2],
    pub b_y: [f64; 2],
    pub theta: f64,
    pub dtheta_dx: f64,
    pub adiabatic_ratio: f64,
}

impl GaugePoint {
    /// Evaluates everything at x; `speed` only enters the adiabaticity ratio.
    pub fn at(model: &FieldModel, x: f64, c: Chirality, speed: f64) -> Self {
        let a = Angle::at(model, x, c);
        let k = model.k12();
        let b_up = k * a.sin_2theta * a.d1;
        let conv = model.convention;
        GaugePoint {
            a_z: [a.a_z(Spin::Up, k), a.a_z(Spin::Down, k)],
            v: [
                scalar_parts(model, &a, Spin::Up, conv).0,
                scalar_parts(model, &a, Spin::Down, conv).0,
            ],
            b_y: [b_up, -b_up],
            theta: a.theta(),
            dtheta_dx: a.d1,
            adiabatic_ratio: adiabatic_ratio_of(model, &a, speed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beams::{BeamTriple, GaussianBeam};
    use crate::reduction::{eigenvalues, EffectiveTwoLevel};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    const K: f64 = 2.0 * PI;

    fn model(r12: f64, r13: f64, r23: f64, det: f64, widths: [f64; 3]) -> FieldModel {
        FieldModel {
            beams: BeamTriple {
                beam12: GaussianBeam::new(r12, 0.0, widths[0], K),
                beam13: GaussianBeam::new(r13, 3.0, widths[1], 2.0 * K),
                beam23: GaussianBeam::new(r23, -3.0, widths[2], K),
            },
            detuning: det,
            mass: 1.0,
            gravity: 24.65,
            convention: ScalarConvention::Paper,
            gauge_coupling: true,
        }
    }

    fn fig3(det: f64) -> FieldModel {
        model(1e-6 * det, 1e-3 * det, 1e-3 * det, det, [7.0, 10.0, 10.0])
    }

    #[test]
    fn vector_potential_values() {
        assert_eq!(vector_potential(0.0, Spin::Up, K), 0.0);
        assert_eq!(vector_potential(0.0, Spin::Down, K), -K);
        assert!((vector_potential(FRAC_PI_4, Spin::Up, K) + K / 2.0).abs() < 1e-15);
        assert!((vector_potential(FRAC_PI_4, Spin::Down, K) + K / 2.0).abs() < 1e-15);
        for i in 0..100 {
            let th = -FRAC_PI_2 + PI * (i as f64 + 0.5) / 100.0;
            let sum = vector_potential(th, Spin::Up, K) + vector_potential(th, Spin::Down, K);
            assert!((sum + K).abs() <= 1e-12 * K);
        }
    }

    #[test]
    fn flat_beams_give_no_gradient() {
        let m = model(0.3, 2.0, 1.5, 40.0, [1e9, 1e9, 1e9]);
        for x in [-3.0, 0.0, 2.0] {
            assert!(theta_gradient(&m, x, Chirality::Left).abs() < 1e-15);
            assert!(magnetic_field(&m, x, Spin::Up, Chirality::Left).abs() < 1e-15);
        }
    }

    #[test]
    fn theta_gradient_matches_fd_at_symmetric_point() {
        let m = fig3(1.586e7);
        for c in Chirality::ALL {
            let lc = LocalCoupling::at(&m, 0.0, c);
            assert!(lc.split[0].abs() < 1e-12 * lc.coupling[0].abs());
            assert!(lc.split[1] != 0.0);
            let h = 1e-4;
            let th = |x: f64| EffectiveTwoLevel::at(&m, x, 0.0, c).theta;
            let fd = (th(h) - th(-h)) / (2.0 * h);
            let an = theta_gradient(&m, 0.0, c);
            assert!(((fd - an) / an).abs() < 1e-6, "{c:?}: fd {fd} an {an}");
        }
    }

    #[test]
    fn theta_gradient_is_even_for_mirrored_beams() {
        // Ω₁₃ = Ω₂₃ and σ₁₃ = σ₂₃: D(−x) = −D(x), g̃(−x) = g̃(x), so
        // θ(−x) = ±π/2 − θ(x) and ∂ₓθ is even in x.
        let m = fig3(1.586e7);
        for c in Chirality::ALL {
            for i in 1..40 {
                let x = 0.37 * i as f64;
                let a = theta_gradient(&m, x, c);
                let b = theta_gradient(&m, -x, c);
                assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-12), "x={x} {a} {b}");
            }
        }
    }

    #[test]
    fn scalar_potential_limits() {
        // no light at all: degenerate, θ = 0 by convention
        let m = model(0.0, 0.0, 0.0, 10.0, [7.0, 10.0, 10.0]);
        let vu = scalar_potential(&m, 0.4, Chirality::Left, Spin::Up, ScalarConvention::Paper);
        let vd = scalar_potential(&m, 0.4, Chirality::Left, Spin::Down, ScalarConvention::Paper);
        assert_eq!(vu, 0.0);
        assert!((vd - K * K).abs() < 1e-12);
    }

    #[test]
    fn scalar_potential_mirror_case() {
        // uniform Ω₂₃ only, red detuning: Λ₂ > 0 = Λ₁ and g̃ = 0, so θ = π/2
        let m = model(0.0, 0.0, 2.0, -10.0, [7.0, 1e9, 1e9]);
        let a = EffectiveTwoLevel::at(&m, 0.0, 0.0, Chirality::Left);
        assert_eq!(a.theta, FRAC_PI_2);
        let vu = scalar_potential(&m, 0.0, Chirality::Left, Spin::Up, ScalarConvention::Paper);
        let vd = scalar_potential(&m, 0.0, Chirality::Left, Spin::Down, ScalarConvention::Paper);
        assert!((vu - (a.eigenvalues.0 + K * K)).abs() < 1e-12);
        assert!((vd - a.eigenvalues.1).abs() < 1e-12);
    }

    #[test]
    fn scalar_potential_balanced_sum() {
        // At x = 0 with mirrored beams D = 0 so θ = ±π/4.
        let m = fig3(1.586e7);
        let a = EffectiveTwoLevel::at(&m, 0.0, 0.0, Chirality::Left);
        assert!((a.theta - FRAC_PI_4).abs() < 1e-12);
        let th1 = theta_gradient(&m, 0.0, Chirality::Left);
        let vu = scalar_potential(&m, 0.0, Chirality::Left, Spin::Up, ScalarConvention::Paper);
        let vd = scalar_potential(&m, 0.0, Chirality::Left, Spin::Down, ScalarConvention::Paper);
        let geo = vu + vd - (a.eigenvalues.0 + a.eigenvalues.1);
        // (1/2m)[2·k²·(1/2)(3/2) + 2θ'²]
        let expect = 0.5 * (2.0 * K * K * 0.5 * 1.5 + 2.0 * th1 * th1);
        assert!((geo - expect).abs() < 1e-9 * expect, "{geo} {expect}");

        let su = scalar_potential(&m, 0.0, Chirality::Left, Spin::Up, ScalarConvention::Standard);
        let sd = scalar_potential(&m, 0.0, Chirality::Left, Spin::Down, ScalarConvention::Standard);
        let geo = su + sd - (a.eigenvalues.0 + a.eigenvalues.1);
        let expect = 0.5 * (2.0 * K * K * 0.5 * 0.5 + 2.0 * th1 * th1);
        assert!((geo - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn unknown_convention_is_an_error() {
        assert!("paper".parse::<ScalarConvention>().is_ok());
        assert!("standard".parse::<ScalarConvention>().is_ok());
        let e = "bogus".parse::<ScalarConvention>().unwrap_err().to_string();
        assert!(e.contains("bogus"));
    }

    #[test]
    fn magnetic_field_antisymmetric_and_matches_fd() {
        let m = fig3(1.586e7);
        for c in Chirality::ALL {
            for i in 0..100 {
                let x = -15.0 + 0.3 * i as f64;
                let up = magnetic_field(&m, x, Spin::Up, c);
                let down = magnetic_field(&m, x, Spin::Down, c);
                assert!((up + down).abs() <= 1e-12);
            }
            let h = 1e-4;
            for x in [-4.2, -1.1, 0.3, 2.7, 6.0] {
                let az = |x: f64| vector_potential(EffectiveTwoLevel::at(&m, x, 0.0, c).theta, Spin::Up, K);
                let fd = -(az(x + h) - az(x - h)) / (2.0 * h);
                let an = magnetic_field(&m, x, Spin::Up, c);
                assert!(((fd - an) / an).abs() < 1e-6, "x={x}: {fd} {an}");
            }
        }
    }

    #[test]
    fn spin_fields_derivatives_match_fd() {
        for m in [fig3(1.586e7), fig3(1.586e7).with_convention(ScalarConvention::Standard)] {
            let h = 1e-5;
            for c in Chirality::ALL {
                for spin in Spin::ALL {
                    for x in [-6.0, -2.3, 0.0, 0.9, 4.4] {
                        let f = spin_fields(&m, x, c, spin);
                        let p = spin_fields(&m, x + h, c, spin);
                        let q = spin_fields(&m, x - h, c, spin);
                        let fd_a = (p.a_z - q.a_z) / (2.0 * h);
                        let fd_v = (p.v - q.v) / (2.0 * h);
                        assert!((fd_a - f.da_z).abs() < 1e-6 * (1.0 + fd_a.abs()), "A x={x}");
                        assert!((fd_v - f.dv).abs() < 1e-6 * (1.0 + fd_v.abs()), "V x={x}: {fd_v} {}", f.dv);
                    }
                }
            }
        }
    }

    #[test]
    fn adiabaticity_cases() {
        let m = fig3(1.586e7);
        assert_eq!(adiabaticity_ratio(&m, 0.0, 0.0, Chirality::Left), 0.0);
        let dead = model(0.0, 0.0, 0.0, 10.0, [7.0, 10.0, 10.0]);
        assert_eq!(adiabaticity_ratio(&dead, 0.0, 1.0, Chirality::Left), f64::INFINITY);
    }

    #[test]
    fn chirality_swap_is_exact() {
        let m = fig3(1.586e7);
        let flipped = m.with_flipped_rabi_12();
        for i in 0..50 {
            let x = -10.0 + 0.4 * i as f64;
            let a = GaugePoint::at(&m, x, Chirality::Left, 3.0);
            let b = GaugePoint::at(&flipped, x, Chirality::Right, 3.0);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn algebraic_trig_matches_angle_forms() {
        for m in [fig3(1.586e7), model(0.0, 0.0, 2.0, -10.0, [7.0, 3.0, 4.0]), model(0.4, 1.2, 0.7, 9.0, [2.0, 3.0, 1.5])] {
            for c in Chirality::ALL {
                for i in 0..200 {
                    let x = -20.0 + 0.2 * i as f64;
                    let a = Angle::at(&m, x, c);
                    let th = a.theta();
                    let scale = a.lc.shifts.0.abs().max(a.lc.shifts.1.abs()).max(a.lc.coupling[0].abs());
                    assert!((a.a_z(Spin::Up, K) - vector_potential(th, Spin::Up, K)).abs() < 1e-14 * K);
                    assert!((a.a_z(Spin::Down, K) - vector_potential(th, Spin::Down, K)).abs() < 1e-14 * K);
                    assert!((a.sin_2theta - (2.0 * th).sin()).abs() < 1e-14);
                    let (up, down) = eigenvalues(a.lc.shifts.0, a.lc.shifts.1, a.lc.coupling[0], th);
                    assert!((a.level(Spin::Up).0 - up).abs() <= 1e-14 * scale);
                    assert!((a.level(Spin::Down).0 - down).abs() <= 1e-14 * scale);
                }
            }
        }
    }

    #[test]
    fn fields_off_are_zero() {
        let m = fig3(1.586e7).without_fields();
        assert_eq!(spin_fields(&m, 0.3, Chirality::Right, Spin::Down), SpinFields::default());
    }
}
