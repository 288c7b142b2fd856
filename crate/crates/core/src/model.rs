use crate::beams::BeamTriple;
use crate::error::Result;
use crate::gauge::ScalarConvention;
use crate::units::NormalizedParams;

/// Everything the field and trajectory code needs, in simulation units.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldModel {
    pub beams: BeamTriple,
    pub detuning: f64,
    pub mass: f64,
    pub gravity: f64,
    pub convention: ScalarConvention,
    /// When false, the molecule feels gravity only (A = V = 0).
    pub gauge_coupling: bool,
}

impl FieldModel {
    /// Builds the model; fails if the wavevectors do not close.
    pub fn new(p: &NormalizedParams) -> Result<Self> {
        let beams = BeamTriple::from_params(p);
        beams.require_closure()?;
        Ok(FieldModel {
            beams,
            detuning: p.detuning,
            mass: p.mass,
            gravity: p.gravity,
            convention: ScalarConvention::Paper,
            gauge_coupling: true,
        })
    }

    pub fn with_convention(mut self, convention: ScalarConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn without_fields(mut self) -> Self {
        self.gauge_coupling = false;
        self
    }

    /// k₁₂, the only wavevector that enters the dressed-state phase.
    pub fn k12(&self) -> f64 {
        self.beams.beam12.wavevector
    }

    /// Same model with Ω⁰₁₂ → −Ω⁰₁₂, which exchanges the roles of the two
    /// enantiomers.
    pub fn with_flipped_rabi_12(&self) -> Self {
        let mut m = self.clone();
        m.beams.beam12.amplitude = -m.beams.beam12.amplitude;
        m
    }
}
