//! Point-local reduction of the cyclic three-level Hamiltonian to the
//! effective two-level (pseudo-spin) problem, plus the exact 3×3 spectrum
//! used to check it.
//!
//! The effective coupling is carried as a signed real amplitude g̃ with the
//! phase fixed at Φ = −k₁₂z. Keeping g̃ signed (rather than |g| with the sign
//! folded into Φ) makes every field smooth in x where the coupling changes
//! sign.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jacobi::symmetric_eigenvalues;
use crate::model::FieldModel;
use crate::units::Chirality;

/// Convergence threshold of the Jacobi oracle, relative to ‖H‖.
pub const JACOBI_TOL: f64 = 1e-14;

/// Above this |θ| the eigenvalues come from the closed form instead of
/// Λⱼ ± g̃ tanθ; there tanθ > 1 and the tan form starts to cancel.
const TAN_FORM_LIMIT: f64 = std::f64::consts::FRAC_PI_4;

/// Effective two-level structure at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveTwoLevel {
    /// Λ₁, Λ₂.
    pub shifts: (f64, f64),
    /// Signed real coupling g̃.
    pub coupling: f64,
    /// Φ = −k₁₂z.
    pub phase: f64,
    pub theta: f64,
    /// λ₁ ≥ λ₂.
    pub eigenvalues: (f64, f64),
}

impl EffectiveTwoLevel {
    pub fn at(model: &FieldModel, x: f64, z: f64, c: Chirality) -> Self {
        let (l1, l2) = energy_shifts(model, x);
        let (g, phase) = effective_coupling(model, x, z, c);
        let theta = mixing_angle(l1, l2, g);
        EffectiveTwoLevel {
            shifts: (l1, l2),
            coupling: g,
            phase,
            theta,
            eigenvalues: eigenvalues(l1, l2, g, theta),
        }
    }

    /// [[Λ₁, g̃e^{iΦ}], [g̃e^{−iΦ}, Λ₂]].
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let off = Complex64::from_polar(self.coupling, self.phase);
        [
            [Complex64::new(self.shifts.0, 0.0), off],
            [off.conj(), Complex64::new(self.shifts.1, 0.0)],
        ]
    }
}

/// Λ₁ = −|Ω₁₃|²/Δ̃, Λ₂ = −|Ω₂₃|²/Δ̃.
pub fn energy_shifts(model: &FieldModel, x: f64) -> (f64, f64) {
    let e13 = model.beams.beam13.envelope(x);
    let e23 = model.beams.beam23.envelope(x);
    (-e13 * e13 / model.detuning, -e23 * e23 / model.detuning)
}

/// Signed coupling g̃ = ±Ω₁₂(x) − Ω₁₃(x)Ω₂₃(x)/Δ̃ (envelopes only) and the
/// common phase Φ = −k₁₂z.
pub fn effective_coupling(model: &FieldModel, x: f64, z: f64, c: Chirality) -> (f64, f64) {
    let b = &model.beams;
    let g = c.sign() * b.beam12.envelope(x) - b.beam13.envelope(x) * b.beam23.envelope(x) / model.detuning;
    (g, -model.k12() * z)
}

/// θ = ½ atan2(2g̃, Λ₁ − Λ₂), in (−π/2, π/2]. Zero at exact degeneracy.
pub fn mixing_angle(l1: f64, l2: f64, g: f64) -> f64 {
    let two_theta = (2.0 * g).atan2(l1 - l2);
    if two_theta <= -std::f64::consts::PI {
        FRAC_PI_2
    } else {
        0.5 * two_theta
    }
}

/// λ₁ = Λ₁ + g̃ tanθ, λ₂ = Λ₂ − g̃ tanθ (λ₁ ≥ λ₂).
pub fn eigenvalues(l1: f64, l2: f64, g: f64, theta: f64) -> (f64, f64) {
    if theta.abs() <= TAN_FORM_LIMIT {
        let shift = g * theta.tan();
        (l1 + shift, l2 - shift)
    } else {
        closed_form_eigenvalues(l1, l2, g)
    }
}

/// (Λ₁+Λ₂)/2 ± ½√((Λ₁−Λ₂)² + 4g̃²).
pub fn closed_form_eigenvalues(l1: f64, l2: f64, g: f64) -> (f64, f64) {
    let mean = 0.5 * (l1 + l2);
    let half_gap = 0.5 * (l1 - l2).hypot(2.0 * g);
    (mean + half_gap, mean - half_gap)
}

/// Amplitudes of a dressed state on the bare states |1⟩, |2⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedState {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl DressedState {
    pub fn inner(&self, other: &DressedState) -> Complex64 {
        self.c1.conj() * other.c1 + self.c2.conj() * other.c2
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr()
    }
}

/// |χ₁⟩ = cosθ|1⟩ + e^{−iΦ}sinθ|2⟩ and |χ₂⟩ = −sinθ|1⟩ + e^{−iΦ}cosθ|2⟩.
pub fn dressed_states(theta: f64, phase: f64) -> (DressedState, DressedState) {
    let (s, c) = theta.sin_cos();
    let rot = Complex64::from_polar(1.0, -phase);
    (
        DressedState { c1: Complex64::new(c, 0.0), c2: rot * s },
        DressedState { c1: Complex64::new(-s, 0.0), c2: rot * c },
    )
}

/// A complex 3×3 matrix expected to be Hermitian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianMatrix3(pub [[Complex64; 3]; 3]);

impl HermitianMatrix3 {
    pub fn trace(&self) -> f64 {
        (0..3).map(|i| self.0[i][i].re).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest deviation from Hermiticity and where it occurs.
    fn hermitian_defect(&self) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0);
        for i in 0..3 {
            for j in i..3 {
                let d = (self.0[i][j] - self.0[j][i].conj()).norm();
                if d > worst.2 {
                    worst = (i, j, d);
                }
            }
        }
        worst
    }

    /// det(H − λI), used as a residual check on eigenvalues.
    pub fn char_poly(&self, lambda: f64) -> Complex64 {
        let m = &self.0;
        let l = Complex64::new(lambda, 0.0);
        let a = |i: usize, j: usize| if i == j { m[i][j] - l } else { m[i][j] };
        a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
    }
}

/// H′ = Δ̃|3⟩⟨3| + Σ_{l>j} Ω_jl|j⟩⟨l| + h.c., with Ω₁₂ carrying the
/// chirality sign.
pub fn full_three_level(model: &FieldModel, x: f64, z: f64, c: Chirality) -> HermitianMatrix3 {
    let b = &model.beams;
    let o12 = b.beam12.rabi(x, z) * c.sign();
    let o13 = b.beam13.rabi(x, z);
    let o23 = b.beam23.rabi(x, z);
    let zero = Complex64::new(0.0, 0.0);
    HermitianMatrix3([
        [zero, o12, o13],
        [o12.conj(), zero, o23],
        [o13.conj(), o23.conj(), Complex64::new(model.detuning, 0.0)],
    ])
}

/// Ascending eigenvalues of a Hermitian 3×3 matrix.
///
/// Diagonalises the real symmetric 6×6 embedding [[Re H, −Im H], [Im H, Re H]],
/// whose spectrum is that of H with every eigenvalue doubled.
pub fn exact_eigs(h: &HermitianMatrix3) -> Result<[f64; 3]> {
    let (row, col, deviation) = h.hermitian_defect();
    if deviation > 1e-12 * h.frobenius().max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian { row, col, deviation });
    }
    let mut a = [[0.0; 6]; 6];
    for i in 0..3 {
        for j in 0..3 {
            let z = h.0[i][j];
            a[i][j] = z.re;
            a[i + 3][j + 3] = z.re;
            a[i][j + 3] = -z.im;
            a[i + 3][j] = z.im;
        }
    }
    let d = symmetric_eigenvalues(a, JACOBI_TOL);
    Ok([0.5 * (d[0] + d[1]), 0.5 * (d[2] + d[3]), 0.5 * (d[4] + d[5])])
}

/// |λⱼ − exactⱼ| for the upper (ε₁) and lower (ε₂) pseudo-spin levels.
///
/// The excited level sits near Δ̃, so the two exact eigenvalues furthest
/// from it are the ones the reduction approximates.
pub fn reduction_error(model: &FieldModel, x: f64, z: f64, c: Chirality) -> (f64, f64) {
    let eff = EffectiveTwoLevel::at(model, x, z, c);
    let exact = exact_eigs(&full_three_level(model, x, z, c)).expect("constructed Hermitian");
    let (lower, upper) = if model.detuning > 0.0 {
        (exact[0], exact[1])
    } else {
        (exact[1], exact[2])
    };
    ((eff.eigenvalues.0 - upper).abs(), (eff.eigenvalues.1 - lower).abs())
}

/// Λ₁−Λ₂, g̃ and Λ₁+Λ₂ with their first and second x-derivatives, all
/// analytic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCoupling {
    /// Λ₁, Λ₂.
    pub shifts: (f64, f64),
    pub split: [f64; 3],
    pub coupling: [f64; 3],
    pub sum: [f64; 2],
}

impl LocalCoupling {
    pub fn at(model: &FieldModel, x: f64, c: Chirality) -> Self {
        let b = &model.beams;
        let det = model.detuning;
        let [e12, d12, dd12] = b.beam12.profile(x);
        let [e13, d13, dd13] = b.beam13.profile(x);
        let [e23, d23, dd23] = b.beam23.profile(x);

        let l1 = [-e13 * e13 / det, -2.0 * e13 * d13 / det, -2.0 * (d13 * d13 + e13 * dd13) / det];
        let l2 = [-e23 * e23 / det, -2.0 * e23 * d23 / det, -2.0 * (d23 * d23 + e23 * dd23) / det];
        let s = c.sign();
        let coupling = [
            s * e12 - e13 * e23 / det,
            s * d12 - (d13 * e23 + e13 * d23) / det,
            s * dd12 - (dd13 * e23 + 2.0 * d13 * d23 + e13 * dd23) / det,
        ];
        LocalCoupling {
            shifts: (l1[0], l2[0]),
            split: [l1[0] - l2[0], l1[1] - l2[1], l1[2] - l2[2]],
            coupling,
            sum: [l1[0] + l2[0], l1[1] + l2[1]],
        }
    }

    /// R = √(D² + 4g̃²) = λ₁ − λ₂.
    pub fn gap(&self) -> f64 {
        self.split[0].hypot(2.0 * self.coupling[0])
    }
}
