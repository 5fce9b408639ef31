//! Charging dynamics of an open quantum battery.
//!
//! A driven, lossy charger mode `a` is coherently coupled to an isolated
//! battery mode `b`. The charger's bath both damps it and shifts its
//! frequency by a Lamb shift `Δ_L`, which moves the normal modes `λ±` of the
//! pair and therefore which of them a fixed drive excites.
//!
//! Modules:
//! - [`model`]: parameters, validation, thermal occupation.
//! - [`eigenmodes`]: coupling matrix, `λ±`, supermode mixing.
//! - [`meanfield`]: amplitude equations (RK4 and exact solution).
//! - [`liouville`]: full density-matrix oracle in a truncated Fock space.
//! - [`ergotropy`]: charger energy and battery ergotropy.
//! - [`harness`]: presets, sweeps, switching contrast, engine dispatch.
//! - [`config`], [`io`]: run files and CSV/JSON output.
//!
//! The numerics are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, the precision every tolerance in the
//! test-suite is stated for.

pub mod config;
pub mod eigenmodes;
pub mod ergotropy;
pub mod error;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod liouville;
pub mod meanfield;
pub mod model;
pub mod num;

pub use config::{EngineKind, RunConfig};
pub use eigenmodes::{
    coupling_matrix, eigenfrequencies, resonant_drive_frequency, supermode_decomposition, Branch,
};
pub use ergotropy::{annotate, ergotropy_from_amplitude};
pub use error::{Error, Result};
pub use harness::{build_preset, run_sweep, switching_contrast, PresetName};
pub use model::{thermal_occupation, validate};
pub use num::{Cplx, Real};

/// Double-precision complex scalar.
pub type C64 = num_complex::Complex<f64>;

pub type SystemParams = model::SystemParams<f64>;
pub type AmplitudePair = model::AmplitudePair<f64>;
pub type CouplingMatrix = eigenmodes::CouplingMatrix<f64>;
pub type SupermodeDecomposition = eigenmodes::SupermodeDecomposition<f64>;
pub type TimeSeries = meanfield::TimeSeries<f64>;
pub type Record = meanfield::Record<f64>;
pub type DensityMatrix = liouville::DensityMatrix<f64>;
pub type EvolveOptions = liouville::EvolveOptions<f64>;
pub type OracleRun = liouville::OracleRun<f64>;
pub type ScenarioPreset = harness::ScenarioPreset<f64>;
pub type SweepResult = harness::SweepResult<f64>;
pub type SweepOptions = harness::SweepOptions<f64>;
pub type RunSettings = harness::RunSettings<f64>;
pub type Simulation = harness::Simulation<f64>;

/// Single-precision aliases.
pub mod f32 {
    use super::*;

    pub type SystemParams = model::SystemParams<f32>;
    pub type AmplitudePair = model::AmplitudePair<f32>;
    pub type SupermodeDecomposition = eigenmodes::SupermodeDecomposition<f32>;
    pub type TimeSeries = meanfield::TimeSeries<f32>;
    pub type DensityMatrix = liouville::DensityMatrix<f32>;
}
