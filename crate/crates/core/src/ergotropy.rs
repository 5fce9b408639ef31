//! Extractable work of the charger and battery.
//!
//! For an oscillator that starts in its ground state and is only ever
//! displaced, the ergotropy against the free Hamiltonian `ω ô†ô` is
//! `ω |⟨ô⟩|²`. The bare frequencies weight the energies; the Lamb shift
//! acts on the dynamics only.

use serde::{Deserialize, Serialize};

use crate::meanfield::{MeanFieldState, Record, TimeSeries};
use crate::model::SystemParams;
use crate::num::{Cplx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord<T> {
    pub t: T,
    pub w_a: T,
    pub w_b: T,
}

impl<T: Real> From<&Record<T>> for EnergyRecord<T> {
    fn from(r: &Record<T>) -> Self {
        Self { t: r.t, w_a: r.w_a, w_b: r.w_b }
    }
}

/// `ω |amplitude|²`.
#[inline]
pub fn ergotropy_from_amplitude<T: Real>(omega: T, amplitude: Cplx<T>) -> T {
    omega * amplitude.norm_sqr()
}

/// Attaches `W_A = ω_a |a|²` and `W_B = ω_b |b|²` to every sample.
pub fn annotate<T: Real>(states: &[MeanFieldState<T>], params: &SystemParams<T>) -> TimeSeries<T> {
    let records = states
        .iter()
        .map(|s| Record {
            t: s.t,
            a: s.amplitudes.a,
            b: s.amplitudes.b,
            w_a: ergotropy_from_amplitude(params.omega_a, s.amplitudes.a),
            w_b: ergotropy_from_amplitude(params.omega_b, s.amplitudes.b),
        })
        .collect();
    TimeSeries { records }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meanfield::{closed_form_series, integrate_states};
    use crate::model::AmplitudePair;
    use crate::num::phasor;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Cplx<f64> {
        Cplx::new(re, im)
    }

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
    fn closed_form_values() {
        assert_eq!(ergotropy_from_amplitude(1.0, c(0.0, 0.0)), 0.0);
        // single-mode steady amplitude −2iF/γ at F = 0.1, γ = 0.05
        assert_abs_diff_eq!(ergotropy_from_amplitude(1.0, c(0.0, -2.0 * 0.1 / 0.05)), 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ergotropy_from_amplitude(2.0, c(1.0, 1.0)), 4.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_trajectory_has_zero_energy() {
        let states: Vec<_> = (0..5)
            .map(|k| MeanFieldState { t: k as f64, amplitudes: AmplitudePair::vacuum() })
            .collect();
        let series = annotate(&states, &fig1());
        assert!(series.records.iter().all(|r| r.w_a == 0.0 && r.w_b == 0.0));
    }

    #[test]
    fn rabi_exchange_conserves_total_energy() {
        let p = SystemParams { drive_amplitude: 0.0, gamma_a: 0.0, ..fig1() };
        let states = integrate_states(&p, AmplitudePair::new(c(1.0, 0.0), c(0.0, 0.0)), 50.0, 0.01).unwrap();
        for r in annotate(&states, &p).records {
            assert!((r.w_a + r.w_b - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn energies_plateau_under_damping() {
        let s = closed_form_series(&fig1(), AmplitudePair::vacuum(), 1200.0, 0.5).unwrap();
        let tail = &s.records[s.len() - 200..];
        let (lo, hi) = tail.iter().fold((f64::MAX, f64::MIN), |(lo, hi), r| (lo.min(r.w_b), hi.max(r.w_b)));
        assert!(hi - lo < 1e-5 * hi, "{lo} {hi}");
    }

    #[test]
    fn bare_frequencies_weight_energies() {
        let p = fig1().with_lamb_shift(0.1);
        let states = [MeanFieldState { t: 0.0, amplitudes: AmplitudePair::new(c(1.0, 0.0), c(0.0, 1.0)) }];
        let r = annotate(&states, &p).records[0];
        assert_eq!((r.w_a, r.w_b), (1.0, 1.0));
        let e = EnergyRecord::from(&r);
        assert_eq!((e.t, e.w_a, e.w_b), (0.0, 1.0, 1.0));
    }

    proptest! {
        #[test]
        fn phase_invariance(re in -5.0f64..5.0, im in -5.0f64..5.0, phi in 0.0f64..6.3, w in 0.1f64..3.0) {
            let z = c(re, im);
            let rotated = z * phasor(phi);
            let (x, y) = (ergotropy_from_amplitude(w, z), ergotropy_from_amplitude(w, rotated));
            prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
        }

        #[test]
        fn frame_invariance(wf in 0.5f64..1.5, t in 0.0f64..100.0, re in -2.0f64..2.0) {
            let lab = AmplitudePair::new(c(re, 0.3), c(0.1, -re));
            let rot = lab.scale(phasor(wf * t));
            let e1 = annotate(&[MeanFieldState { t, amplitudes: lab }], &fig1()).records[0];
            let e2 = annotate(&[MeanFieldState { t, amplitudes: rot }], &fig1()).records[0];
            prop_assert!((e1.w_a - e2.w_a).abs() < 1e-12 && (e1.w_b - e2.w_b).abs() < 1e-12);
        }

        #[test]
        fn quadratic_in_drive(dl in -0.2f64..0.2) {
            let p = fig1().with_lamb_shift(dl);
            let s1 = closed_form_series(&p, AmplitudePair::vacuum(), 50.0, 0.5).unwrap();
            let s2 = closed_form_series(&p.with_drive_amplitude(0.2), AmplitudePair::vacuum(), 50.0, 0.5).unwrap();
            for (x, y) in s1.records.iter().zip(&s2.records).skip(1) {
                prop_assert!((4.0 * x.w_a - y.w_a).abs() <= 1e-10 * y.w_a);
                prop_assert!((4.0 * x.w_b - y.w_b).abs() <= 1e-10 * y.w_b.max(1e-300));
            }
        }
    }
}
