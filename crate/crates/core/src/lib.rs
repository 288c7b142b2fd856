//! Optical gauge potentials for cyclic three-level chiral molecules and
//! classical Stern-Gerlach trajectories of mixed enantiomer ensembles.
//!
//! The pipeline runs [`units`] → [`beams`] → [`reduction`] → [`gauge`] →
//! [`dynamics`] → [`ensemble`]; [`config`], [`output`], [`validate`] and
//! [`cli`] wrap it as a command-line tool.

pub mod beams;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod gauge;
pub mod jacobi;
pub mod model;
pub mod output;
pub mod reduction;
pub mod units;
pub mod validate;

pub use config::{load_config, parse_config, Preset, RunConfig};
pub use dynamics::{integrate, IntegratorConfig, PhaseSpaceState};
pub use ensemble::{run_experiment, separation_stats, EnsembleConfig, SeparationStats};
pub use error::{Error, Result};
pub use gauge::ScalarConvention;
pub use model::FieldModel;
pub use units::{normalize, Chirality, NormalizedParams, PhysicalParams, Species, Spin};
