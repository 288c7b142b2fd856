//! Gaussian Rabi-frequency profiles of the three coupling lasers.
//!
//! All beams co-propagate along −z and are independent of y, so a field
//! value depends on (x, z) only and the modulus on x only.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::units::NormalizedParams;

/// One laser's Rabi envelope Ω⁰ exp(−(x−x_c)²/σ²) exp(−ikz).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBeam {
    /// Real peak amplitude Ω⁰.
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub wavevector: f64,
}

impl GaussianBeam {
    pub fn new(amplitude: f64, center: f64, width: f64, wavevector: f64) -> Self {
        debug_assert!(width > 0.0);
        GaussianBeam { amplitude, center, width, wavevector }
    }

    /// Real envelope Ω⁰ exp(−(x−x_c)²/σ²).
    #[inline]
    pub fn envelope(&self, x: f64) -> f64 {
        let u = (x - self.center) / self.width;
        self.amplitude * (-u * u).exp()
    }

    /// d/dx of [`envelope`](Self::envelope).
    #[inline]
    pub fn envelope_dx(&self, x: f64) -> f64 {
        let u = x - self.center;
        let s2 = self.width * self.width;
        -2.0 * u / s2 * self.envelope(x)
    }

    /// d²/dx² of [`envelope`](Self::envelope).
    #[inline]
    pub fn envelope_dx2(&self, x: f64) -> f64 {
        let u = x - self.center;
        let s2 = self.width * self.width;
        (4.0 * u * u / (s2 * s2) - 2.0 / s2) * self.envelope(x)
    }

    /// Envelope with its first and second x-derivatives, sharing one exp.
    #[inline]
    pub fn profile(&self, x: f64) -> [f64; 3] {
        let u = x - self.center;
        let s2 = self.width * self.width;
        let e = self.envelope(x);
        [e, -2.0 * u / s2 * e, (4.0 * u * u / (s2 * s2) - 2.0 / s2) * e]
    }

    /// Complex Rabi frequency at (x, z).
    pub fn rabi(&self, x: f64, z: f64) -> Complex64 {
        Complex64::from_polar(1.0, -self.wavevector * z) * self.envelope(x)
    }
}

/// Free-function form of [`GaussianBeam::rabi`].
pub fn rabi(b: &GaussianBeam, x: f64, z: f64) -> Complex64 {
    b.rabi(x, z)
}

/// Free-function form of [`GaussianBeam::envelope_dx`].
pub fn envelope_dx(b: &GaussianBeam, x: f64) -> f64 {
    b.envelope_dx(x)
}

/// The Ω₁₂, Ω₁₃, Ω₂₃ beams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamTriple {
    pub beam12: GaussianBeam,
    pub beam13: GaussianBeam,
    pub beam23: GaussianBeam,
}

impl BeamTriple {
    /// Standard geometry: Ω₁₂ centred at 0, Ω₁₃ at +Δx, Ω₂₃ at −Δx.
    pub fn from_params(p: &NormalizedParams) -> Self {
        BeamTriple {
            beam12: GaussianBeam::new(p.rabi_12, 0.0, p.sigma_12, p.k12),
            beam13: GaussianBeam::new(p.rabi_13, p.beam_offset, p.sigma_13, p.k13),
            beam23: GaussianBeam::new(p.rabi_23, -p.beam_offset, p.sigma_23, p.k23),
        }
    }

    pub fn closure_residual(&self) -> f64 {
        self.beam12.wavevector + self.beam23.wavevector - self.beam13.wavevector
    }

    /// True iff k₁₂ + k₂₃ − k₁₃ is exactly zero.
    pub fn check_closure(&self) -> bool {
        self.closure_residual() == 0.0
    }

    pub fn require_closure(&self) -> Result<()> {
        if self.check_closure() {
            Ok(())
        } else {
            Err(Error::Closure { residual: self.closure_residual() })
        }
    }
}

/// Free-function form of [`BeamTriple::check_closure`].
pub fn check_closure(t: &BeamTriple) -> bool {
    t.check_closure()
}
