use thiserror::Error;

/// Errors raised by parameter validation and the numerical engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("negative decay rate: gamma_a = {0}")]
    NegativeDecayRate(f64),

    #[error("renormalized frequency non-positive: omega_a + lamb_shift = {0}")]
    NonPositiveRenormalizedFrequency(f64),

    #[error("supermodes undefined for decoupled system (g = 0)")]
    DecoupledSystem,

    #[error("mean-field engine valid only at N = 0 (n_thermal = {0})")]
    NonZeroTemperature(f64),

    #[error("time step {dt} exceeds resolution guard; maximal admissible dt is {max_dt}")]
    StepTooLarge { dt: f64, max_dt: f64 },

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("resonant undamped drive: secular growth, no steady state")]
    SecularGrowth,

    #[error("no steady state without dissipation")]
    NoSteadyState,

    #[error("truncation/step failure, increase cutoff or decrease dt ({0})")]
    TruncationFailure(String),

    #[error("invalid Fock basis: {0}")]
    InvalidBasis(String),

    #[error("unknown preset `{name}`; valid presets: {valid}")]
    UnknownPreset { name: String, valid: String },

    #[error("mismatched Lamb-shift grids between sweeps")]
    MismatchedGrids,

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SecularGrowth | Error::NoSteadyState | Error::TruncationFailure(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
