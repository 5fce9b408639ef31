//! Physical parameters, amplitudes and the bath occupation.
//!
//! Every quantity is expressed in units of a reference angular frequency
//! `ω`, with `ħ = k_B = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{is_finite_c, Cplx, Real};

/// Parameters of the driven charger/battery pair.
///
/// The Lamb shift is an independent input and is never derived from a bath
/// spectral density. The bath is described directly by its mean occupation
/// `n_thermal`; see [`thermal_occupation`] to convert from a temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams<T> {
    /// Bare charger frequency `ω_a`.
    pub omega_a: T,
    /// Battery frequency `ω_b`.
    pub omega_b: T,
    /// Charger/battery coupling `g`.
    pub g: T,
    /// Drive amplitude `F`.
    pub drive_amplitude: T,
    /// Drive frequency `ω_f`.
    pub drive_frequency: T,
    /// Charger decay rate `γ_a`.
    pub gamma_a: T,
    /// Lamb shift `Δ_L` (negative: redshift, positive: blueshift).
    pub lamb_shift: T,
    /// Mean bath occupation `N(T)`.
    pub n_thermal: T,
}

impl<T: Real> SystemParams<T> {
    /// Renormalized charger frequency `ω_a' = ω_a + Δ_L`.
    #[inline]
    pub fn omega_a_prime(&self) -> T {
        self.omega_a + self.lamb_shift
    }

    pub fn validate(self) -> Result<Self> {
        validate(self)
    }

    pub fn with_lamb_shift(mut self, lamb_shift: T) -> Self {
        self.lamb_shift = lamb_shift;
        self
    }

    pub fn with_drive_frequency(mut self, drive_frequency: T) -> Self {
        self.drive_frequency = drive_frequency;
        self
    }

    pub fn with_drive_amplitude(mut self, drive_amplitude: T) -> Self {
        self.drive_amplitude = drive_amplitude;
        self
    }

    /// Converts every field to another scalar type.
    pub fn cast<U: Real>(&self) -> SystemParams<U> {
        let c = |x: T| U::lit(x.as_f64());
        SystemParams {
            omega_a: c(self.omega_a),
            omega_b: c(self.omega_b),
            g: c(self.g),
            drive_amplitude: c(self.drive_amplitude),
            drive_frequency: c(self.drive_frequency),
            gamma_a: c(self.gamma_a),
            lamb_shift: c(self.lamb_shift),
            n_thermal: c(self.n_thermal),
        }
    }
}

/// Mean-field amplitudes `(⟨a⟩, ⟨b⟩)` at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AmplitudePair<T> {
    pub a: Cplx<T>,
    pub b: Cplx<T>,
}

impl<T: Real> AmplitudePair<T> {
    pub fn new(a: Cplx<T>, b: Cplx<T>) -> Self {
        Self { a, b }
    }

    /// Both modes in the ground state.
    pub fn vacuum() -> Self {
        Self::new(Cplx::new(T::zero(), T::zero()), Cplx::new(T::zero(), T::zero()))
    }

    pub fn is_finite(&self) -> bool {
        is_finite_c(self.a) && is_finite_c(self.b)
    }

    /// `|a|² + |b|²`, the total excitation carried by the amplitudes.
    pub fn norm_sqr(&self) -> T {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    /// Largest component-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.a - other.a).norm().max((self.b - other.b).norm())
    }

    pub fn scale(&self, k: Cplx<T>) -> Self {
        Self::new(self.a * k, self.b * k)
    }
}

fn field<T: Real>(name: &'static str, value: T, positive: bool, nonneg: bool) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter {
            field: name,
            reason: format!("must be finite, got {value}"),
        });
    }
    if positive && value <= T::zero() {
        return Err(Error::InvalidParameter {
            field: name,
            reason: format!("must be strictly positive, got {value}"),
        });
    }
    if nonneg && value < T::zero() {
        return Err(Error::InvalidParameter {
            field: name,
            reason: format!("must be non-negative, got {value}"),
        });
    }
    Ok(())
}

/// Checks every parameter invariant and returns the parameters unchanged.
///
/// The drive frequency only has to be finite: in the strong-coupling regime
/// the lower normal mode `λ−` is negative and the presets drive it there.
pub fn validate<T: Real>(params: SystemParams<T>) -> Result<SystemParams<T>> {
    let p = &params;
    field("omega_a", p.omega_a, true, false)?;
    field("omega_b", p.omega_b, true, false)?;
    field("g", p.g, false, true)?;
    field("drive_amplitude", p.drive_amplitude, false, true)?;
    field("drive_frequency", p.drive_frequency, false, false)?;
    field("gamma_a", p.gamma_a, false, false)?;
    if p.gamma_a < T::zero() {
        return Err(Error::NegativeDecayRate(p.gamma_a.as_f64()));
    }
    field("lamb_shift", p.lamb_shift, false, false)?;
    field("n_thermal", p.n_thermal, false, true)?;
    let w = p.omega_a_prime();
    if w <= T::zero() {
        return Err(Error::NonPositiveRenormalizedFrequency(w.as_f64()));
    }
    Ok(params)
}

/// Bose-Einstein occupation `1 / (exp(ω/T) − 1)`, exactly zero at `T = 0`.
pub fn thermal_occupation<T: Real>(omega: T, temperature: T) -> T {
    if temperature <= T::zero() {
        return T::zero();
    }
    T::one() / (omega / temperature).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fig1() -> SystemParams<f64> {
        SystemParams {
            omega_a: 1.0,
            omega_b: 1.0,
            g: 0.16,
            drive_amplitude: 0.1,
            drive_frequency: 0.84,
            gamma_a: 0.05,
            lamb_shift: 0.0,
            n_thermal: 0.0,
        }
    }

    #[test]
    fn accepts_weak_coupling_parameters() {
        assert_eq!(validate(fig1()), Ok(fig1()));
    }

    #[test]
    fn rejects_negative_decay() {
        let p = SystemParams { gamma_a: -0.05, ..fig1() };
        let err = validate(p).unwrap_err();
        assert_eq!(err, Error::NegativeDecayRate(-0.05));
        assert!(err.to_string().contains("negative decay rate"));
    }

    #[test]
    fn rejects_inverted_charger_level() {
        let err = validate(fig1().with_lamb_shift(-1.5)).unwrap_err();
        assert!(matches!(err, Error::NonPositiveRenormalizedFrequency(_)));
        assert!(err.to_string().contains("renormalized frequency non-positive"));
        // exactly zero is rejected too
        assert!(validate(fig1().with_lamb_shift(-1.0)).is_err());
    }

    #[test]
    fn rejects_non_finite_and_non_positive_fields() {
        for p in [
            SystemParams { omega_a: 0.0, ..fig1() },
            SystemParams { omega_b: -1.0, ..fig1() },
            SystemParams { g: -0.1, ..fig1() },
            SystemParams { drive_amplitude: -0.1, ..fig1() },
            SystemParams { drive_frequency: f64::NAN, ..fig1() },
            SystemParams { n_thermal: -0.5, ..fig1() },
            SystemParams { lamb_shift: f64::INFINITY, ..fig1() },
        ] {
            assert!(validate(p).is_err(), "{p:?}");
        }
    }

    #[test]
    fn negative_drive_frequency_is_allowed() {
        let p = fig1().with_drive_frequency(-0.6);
        assert!(validate(p).is_ok());
    }

    #[test]
    fn thermal_occupation_values() {
        assert_eq!(thermal_occupation(1.0, 0.0), 0.0);
        let t = 3.7;
        assert_relative_eq!(thermal_occupation(std::f64::consts::LN_2 * t, t), 1.0, epsilon = 1e-12);
        assert!((thermal_occupation(1.0f64, 10.0) - 9.50833).abs() < 1e-5);
    }

    #[test]
    fn classical_limit() {
        let n: f64 = thermal_occupation(1.0, 1e3);
        assert!((n * 1.0 / 1e3 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn single_precision_params() {
        let p: SystemParams<f32> = fig1().cast();
        assert!(validate(p).is_ok());
        assert!((p.omega_a_prime() - 1.0).abs() < 1e-7);
    }

    proptest! {
        #[test]
        fn occupation_monotone_in_temperature(omega in 0.01f64..10.0, t1 in 0.0f64..50.0, dt in 1e-3f64..50.0) {
            prop_assert!(thermal_occupation(omega, t1 + dt) >= thermal_occupation(omega, t1));
        }

        #[test]
        fn validate_is_idempotent(g in 0.0f64..3.0, dl in -0.9f64..0.9, gamma in 0.0f64..1.0, wf in -3.0f64..3.0) {
            let p = SystemParams { g, lamb_shift: dl, gamma_a: gamma, drive_frequency: wf, ..fig1() };
            let once = validate(p).unwrap();
            prop_assert_eq!(validate(once), Ok(once));
        }
    }
}
