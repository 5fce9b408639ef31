//! Flat key-value run configuration (JSON).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liouville::FockBasis;
use crate::model::{validate, SystemParams};
use crate::num::Real;

/// Which engine produces the trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    #[default]
    Meanfield,
    Liouville,
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EngineKind::Meanfield => "meanfield",
            EngineKind::Liouville => "liouville",
        })
    }
}

impl FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "meanfield" => Ok(EngineKind::Meanfield),
            "liouville" => Ok(EngineKind::Liouville),
            other => Err(Error::Parse(format!(
                "unknown engine `{other}` (expected meanfield|liouville)"
            ))),
        }
    }
}

pub const DEFAULT_T_FINAL: f64 = 200.0;
pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_CUTOFF: usize = 10;

fn default_t_final() -> f64 {
    DEFAULT_T_FINAL
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_cutoff() -> usize {
    DEFAULT_CUTOFF
}

/// Contents of a run configuration file.
///
/// Physical parameters are mandatory; run settings fall back to
/// `t_final = 200`, `dt = 0.01`, the mean-field engine and cutoffs of 10.
/// Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub omega_a: f64,
    pub omega_b: f64,
    pub g: f64,
    pub drive_amplitude: f64,
    pub drive_frequency: f64,
    pub gamma_a: f64,
    pub lamb_shift: f64,
    pub n_thermal: f64,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub engine: EngineKind,
    #[serde(default = "default_cutoff")]
    pub fock_cutoff_a: usize,
    #[serde(default = "default_cutoff")]
    pub fock_cutoff_b: usize,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Validated physical parameters in the requested precision.
    pub fn params<T: Real>(&self) -> Result<SystemParams<T>> {
        let p = SystemParams {
            omega_a: self.omega_a,
            omega_b: self.omega_b,
            g: self.g,
            drive_amplitude: self.drive_amplitude,
            drive_frequency: self.drive_frequency,
            gamma_a: self.gamma_a,
            lamb_shift: self.lamb_shift,
            n_thermal: self.n_thermal,
        };
        validate(validate(p)?.cast())
    }

    pub fn basis(&self) -> Result<FockBasis> {
        FockBasis::new(self.fock_cutoff_a, self.fock_cutoff_b)
    }

    pub fn from_params(params: &SystemParams<f64>) -> Self {
        Self {
            omega_a: params.omega_a,
            omega_b: params.omega_b,
            g: params.g,
            drive_amplitude: params.drive_amplitude,
            drive_frequency: params.drive_frequency,
            gamma_a: params.gamma_a,
            lamb_shift: params.lamb_shift,
            n_thermal: params.n_thermal,
            t_final: DEFAULT_T_FINAL,
            dt: DEFAULT_DT,
            engine: EngineKind::default(),
            fock_cutoff_a: DEFAULT_CUTOFF,
            fock_cutoff_b: DEFAULT_CUTOFF,
        }
    }
}
