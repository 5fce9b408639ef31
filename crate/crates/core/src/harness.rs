//! Scenario presets, engine dispatch and Lamb-shift sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{EngineKind, RunConfig, DEFAULT_CUTOFF, DEFAULT_DT, DEFAULT_T_FINAL};
use crate::eigenmodes::{resonant_drive_frequency, Branch};
use crate::error::{Error, Result};
use crate::liouville::{self, DensityMatrix, Diagnostics, EvolveOptions, FockBasis};
use crate::meanfield::{self, TimeSeries};
use crate::model::{validate, AmplitudePair, SystemParams};
use crate::num::Real;

/// Fraction of the final value defining the settle band.
pub const SETTLE_BAND: f64 = 0.02;

/// Time grid, engine and truncation for one simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings<T> {
    pub t_final: T,
    pub dt: T,
    pub engine: EngineKind,
    pub basis: FockBasis,
    pub evolve: EvolveOptions<T>,
}

impl<T: Real> Default for RunSettings<T> {
    fn default() -> Self {
        Self {
            t_final: T::lit(DEFAULT_T_FINAL),
            dt: T::lit(DEFAULT_DT),
            engine: EngineKind::Meanfield,
            basis: FockBasis::new(DEFAULT_CUTOFF, DEFAULT_CUTOFF).expect("valid default basis"),
            evolve: EvolveOptions::default(),
        }
    }
}

impl<T: Real> RunSettings<T> {
    pub fn from_config(config: &RunConfig) -> Result<Self> {
        Ok(Self {
            t_final: T::lit(config.t_final),
            dt: T::lit(config.dt),
            engine: config.engine,
            basis: config.basis()?,
            evolve: EvolveOptions::default(),
        })
    }

    pub fn with_engine(mut self, engine: EngineKind) -> Self {
        self.engine = engine;
        self
    }

    pub fn with_grid(mut self, t_final: T, dt: T) -> Self {
        self.t_final = t_final;
        self.dt = dt;
        self
    }

    pub fn with_basis(mut self, basis: FockBasis) -> Self {
        self.basis = basis;
        self
    }
}

/// Output of either engine. The oracle also reports per-sample health.
#[derive(Debug, Clone)]
pub struct Simulation<T> {
    pub series: TimeSeries<T>,
    pub diagnostics: Option<Vec<Diagnostics<T>>>,
}

/// Simulates from the vacuum with the selected engine.
pub fn simulate<T: Real>(params: &SystemParams<T>, settings: &RunSettings<T>) -> Result<Simulation<T>> {
    let params = validate(*params)?;
    match settings.engine {
        EngineKind::Meanfield => Ok(Simulation {
            series: meanfield::simulate(&params, AmplitudePair::vacuum(), settings.t_final, settings.dt)?,
            diagnostics: None,
        }),
        EngineKind::Liouville => {
            let run = liouville::simulate(
                &DensityMatrix::vacuum(settings.basis),
                &params,
                settings.t_final,
                settings.dt,
                &settings.evolve,
            )?;
            Ok(Simulation { series: run.series, diagnostics: Some(run.diagnostics) })
        }
    }
}

/// Largest deviations between the mean-field engine and the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub max_dev_a: f64,
    pub max_dev_b: f64,
    pub max_trace_err: f64,
    pub max_trunc_tail: f64,
    pub max_hermiticity_err: f64,
    pub min_eigenvalue: f64,
}

/// Runs both engines on the same grid and compares first moments.
pub fn oracle_check<T: Real>(params: &SystemParams<T>, settings: &RunSettings<T>) -> Result<OracleCheck> {
    let params = validate(*params)?;
    let reference = meanfield::simulate(&params, AmplitudePair::vacuum(), settings.t_final, settings.dt)?;
    let run = liouville::simulate(
        &DensityMatrix::vacuum(settings.basis),
        &params,
        settings.t_final,
        settings.dt,
        &settings.evolve.with_stride(1),
    )?;
    let (da, db) = run.series.max_amplitude_deviation(&reference);
    Ok(OracleCheck {
        max_dev_a: da.as_f64(),
        max_dev_b: db.as_f64(),
        max_trace_err: run.max_trace_error().as_f64(),
        max_trunc_tail: run.max_truncation_tail().as_f64(),
        max_hermiticity_err: run.max_hermiticity_error.as_f64(),
        min_eigenvalue: run.final_state.smallest_eigenvalue().as_f64(),
    })
}

/// Scenarios of the weak/strong and resonant/detuned studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresetName {
    Fig1WeakResonant,
    Fig2StrongResonant,
    Fig3StrongDetuned,
}

impl PresetName {
    pub const ALL: [PresetName; 3] =
        [PresetName::Fig1WeakResonant, PresetName::Fig2StrongResonant, PresetName::Fig3StrongDetuned];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::Fig1WeakResonant => "fig1_weak_resonant",
            PresetName::Fig2StrongResonant => "fig2_strong_resonant",
            PresetName::Fig3StrongDetuned => "fig3_strong_detuned",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|p| p.as_str() == s).ok_or_else(|| Error::UnknownPreset {
            name: s.to_string(),
            valid: Self::ALL.map(|p| p.as_str()).join(", "),
        })
    }
}

/// A parameter template plus the branch and Lamb-shift grid to sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPreset<T> {
    pub name: PresetName,
    /// Template; the drive frequency is resolved per sweep point.
    pub base_params: SystemParams<T>,
    pub branch: Branch,
    pub lamb_grid: Vec<T>,
}

pub const DEFAULT_LAMB_GRID: [f64; 5] = [-0.2, -0.1, 0.0, 0.1, 0.2];

impl<T: Real> ScenarioPreset<T> {
    pub fn from_name(name: PresetName) -> Self {
        let (omega_a, g) = match name {
            PresetName::Fig1WeakResonant => (1.0, 0.16),
            PresetName::Fig2StrongResonant => (1.0, 1.6),
            PresetName::Fig3StrongDetuned => (2.0 / 3.0, 1.6),
        };
        let mut base_params = SystemParams {
            omega_a: T::lit(omega_a),
            omega_b: T::one(),
            g: T::lit(g),
            drive_amplitude: T::lit(0.1),
            drive_frequency: T::one(),
            gamma_a: T::lit(0.05),
            lamb_shift: T::zero(),
            n_thermal: T::zero(),
        };
        base_params.drive_frequency = resonant_drive_frequency(&base_params, Branch::Minus);
        Self {
            name,
            base_params,
            branch: Branch::Minus,
            lamb_grid: DEFAULT_LAMB_GRID.iter().map(|&x| T::lit(x)).collect(),
        }
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    pub fn with_lamb_grid(mut self, grid: Vec<T>) -> Self {
        self.lamb_grid = grid;
        self
    }

    pub fn with_drive_amplitude(mut self, drive_amplitude: T) -> Self {
        self.base_params.drive_amplitude = drive_amplitude;
        self
    }

    /// Parameters at one sweep point. The drive tracks `λ_branch(Δ_L)`, or
    /// stays at `λ_branch(0)` when `fixed_drive` is set.
    pub fn params_at(&self, lamb_shift: T, fixed_drive: bool) -> SystemParams<T> {
        let reference = if fixed_drive { T::zero() } else { lamb_shift };
        let omega_f =
            resonant_drive_frequency(&self.base_params.with_lamb_shift(reference), self.branch);
        self.base_params.with_lamb_shift(lamb_shift).with_drive_frequency(omega_f)
    }
}

/// Builds a preset by name.
pub fn build_preset<T: Real>(name: &str) -> Result<ScenarioPreset<T>> {
    Ok(ScenarioPreset::from_name(name.parse()?))
}

/// Summary of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow<T> {
    pub delta_l: T,
    pub branch: Branch,
    pub omega_f_used: T,
    pub w_a_final: T,
    pub w_b_final: T,
    pub w_a_peak: T,
    pub w_b_peak: T,
    pub t_settle: T,
}

impl<T: Real> SweepRow<T> {
    fn failed(delta_l: T, branch: Branch, omega_f_used: T) -> Self {
        let nan = T::nan();
        Self {
            delta_l,
            branch,
            omega_f_used,
            w_a_final: nan,
            w_b_final: nan,
            w_a_peak: nan,
            w_b_peak: nan,
            t_settle: nan,
        }
    }

    pub fn is_failed(&self) -> bool {
        self.w_b_final.is_nan()
    }
}

/// A point whose simulation failed; its row carries NaN metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure<T> {
    pub delta_l: T,
    pub branch: Branch,
    pub error: Error,
}

/// Rows in grid order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult<T> {
    pub rows: Vec<SweepRow<T>>,
    pub failures: Vec<SweepFailure<T>>,
}

impl<T: Real> SweepResult<T> {
    pub fn row(&self, delta_l: T) -> Option<&SweepRow<T>> {
        self.rows.iter().find(|r| r.delta_l == delta_l)
    }

    pub fn extend(&mut self, other: SweepResult<T>) {
        self.rows.extend(other.rows);
        self.failures.extend(other.failures);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions<T> {
    pub settings: RunSettings<T>,
    /// Keep `ω_f` at its `Δ_L = 0` value instead of tracking `λ(Δ_L)`.
    pub fixed_drive: bool,
}

impl<T: Real> Default for SweepOptions<T> {
    fn default() -> Self {
        Self { settings: RunSettings::default(), fixed_drive: false }
    }
}

/// First time after which `w` stays within `band · |final|` of its final value.
pub fn settle_time<T: Real>(series: &TimeSeries<T>, band: T) -> T {
    let Some(last) = series.last() else {
        return T::nan();
    };
    let tolerance = band * last.w_b.abs();
    let records = &series.records;
    match records.iter().rposition(|r| (r.w_b - last.w_b).abs() > tolerance) {
        None => records[0].t,
        Some(k) => records[(k + 1).min(records.len() - 1)].t,
    }
}

/// Summary metrics of one trajectory.
pub fn summarize<T: Real>(series: &TimeSeries<T>, delta_l: T, branch: Branch, omega_f: T) -> SweepRow<T> {
    let last = series.last().expect("non-empty trajectory");
    let (w_a_peak, w_b_peak) = series
        .records
        .iter()
        .fold((T::zero(), T::zero()), |(pa, pb), r| (pa.max(r.w_a), pb.max(r.w_b)));
    SweepRow {
        delta_l,
        branch,
        omega_f_used: omega_f,
        w_a_final: last.w_a,
        w_b_final: last.w_b,
        w_a_peak,
        w_b_peak,
        t_settle: settle_time(series, T::lit(SETTLE_BAND)),
    }
}

/// Simulates every grid point of a preset; points run concurrently and
/// failed points are marked without stopping the rest.
pub fn run_sweep<T: Real>(preset: &ScenarioPreset<T>, options: &SweepOptions<T>) -> SweepResult<T> {
    let outcomes: Vec<(SweepRow<T>, Option<Error>)> = preset
        .lamb_grid
        .par_iter()
        .map(|&delta_l| {
            let params = preset.params_at(delta_l, options.fixed_drive);
            let omega_f = params.drive_frequency;
            match simulate(&params, &options.settings) {
                Ok(sim) => (summarize(&sim.series, delta_l, preset.branch, omega_f), None),
                Err(e) => (SweepRow::failed(delta_l, preset.branch, omega_f), Some(e)),
            }
        })
        .collect();
    let mut result = SweepResult::default();
    for (row, err) in outcomes {
        if let Some(error) = err {
            result.failures.push(SweepFailure { delta_l: row.delta_l, branch: row.branch, error });
        }
        result.rows.push(row);
    }
    result
}

/// `(Δ_L, [W_B(+) − W_B(−)] / [W_B(+) + W_B(−)])` for each grid point.
///
/// A sign change across `Δ_L = 0` is the switching effect.
pub fn switching_contrast<T: Real>(
    result_minus: &SweepResult<T>,
    result_plus: &SweepResult<T>,
) -> Result<Vec<(T, T)>> {
    if result_minus.rows.len() != result_plus.rows.len()
        || result_minus.rows.iter().zip(&result_plus.rows).any(|(m, p)| m.delta_l != p.delta_l)
    {
        return Err(Error::MismatchedGrids);
    }
    Ok(result_minus
        .rows
        .iter()
        .zip(&result_plus.rows)
        .map(|(m, p)| {
            let sum = p.w_b_final + m.w_b_final;
            let contrast = if sum == T::zero() { T::zero() } else { (p.w_b_final - m.w_b_final) / sum };
            (m.delta_l, contrast)
        })
        .collect())
}
