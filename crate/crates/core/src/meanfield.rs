//! Zero-temperature amplitude equations for the driven charger/battery pair.
//!
//! ```text
//! d⟨a⟩/dt = −i F e^{−i ω_f t} − i g ⟨b⟩ − (γ_a/2 + i ω_a') ⟨a⟩
//! d⟨b⟩/dt = −i g ⟨a⟩ − i ω_b ⟨b⟩
//! ```
//!
//! Two independent routes are provided: a fixed-step RK4 integrator of the
//! lab-frame equations, and the exact solution of the autonomous system in
//! the frame rotating at `ω_f`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::eigenmodes::{coupling_matrix, eigenfrequencies};
use crate::ergotropy::annotate;
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::model::{AmplitudePair, SystemParams};
use crate::num::{minus_i, phasor, Cplx, Real};

/// Amplitudes at one sample time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldState<T> {
    pub t: T,
    pub amplitudes: AmplitudePair<T>,
}

/// One sample of an annotated trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record<T> {
    pub t: T,
    pub a: Cplx<T>,
    pub b: Cplx<T>,
    /// Charger energy `ω_a |a|²`.
    pub w_a: T,
    /// Battery ergotropy `ω_b |b|²`.
    pub w_b: T,
}

impl<T: Real> Record<T> {
    pub fn amplitudes(&self) -> AmplitudePair<T> {
        AmplitudePair::new(self.a, self.b)
    }
}

/// Time-ordered samples of `(t, ⟨a⟩, ⟨b⟩, W_A, W_B)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TimeSeries<T> {
    pub records: Vec<Record<T>>,
}

impl<T: Real> TimeSeries<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&Record<T>> {
        self.records.last()
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        self.records.iter().map(|r| r.t)
    }

    /// Largest amplitude deviation `(max |Δa|, max |Δb|)` between two series
    /// sampled on the same grid.
    pub fn max_amplitude_deviation(&self, other: &Self) -> (T, T) {
        assert_eq!(self.len(), other.len(), "series sampled on different grids");
        self.records.iter().zip(&other.records).fold(
            (T::zero(), T::zero()),
            |(da, db), (x, y)| (da.max((x.a - y.a).norm()), db.max((x.b - y.b).norm())),
        )
    }
}

/// Largest admissible step, `0.1 / max(ω_a', ω_b, λ+)`.
pub fn max_time_step<T: Real>(params: &SystemParams<T>) -> T {
    let (lambda_plus, _) = eigenfrequencies(&coupling_matrix(params));
    let fastest = params.omega_a_prime().max(params.omega_b).max(lambda_plus);
    T::lit(0.1) / fastest
}

/// Sample times `0, dt, …, floor(t_final/dt)·dt`.
pub(crate) fn sample_times<T: Real>(t_final: T, dt: T) -> Result<Vec<T>> {
    if !(t_final > T::zero() && t_final.is_finite()) {
        return Err(Error::InvalidTimeGrid(format!("t_final must be positive, got {t_final}")));
    }
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(Error::InvalidTimeGrid(format!("dt must be positive, got {dt}")));
    }
    // Guard against 200/0.01 landing just below an integer.
    let steps = (t_final / dt * (T::one() + T::lit(16.0) * T::epsilon())).floor();
    let steps = steps
        .to_usize()
        .ok_or_else(|| Error::InvalidTimeGrid(format!("too many steps: {steps}")))?;
    Ok((0..=steps).map(|k| T::from_usize_exact(k) * dt).collect())
}

pub(crate) fn check_step<T: Real>(params: &SystemParams<T>, dt: T) -> Result<()> {
    let max_dt = max_time_step(params);
    if dt > max_dt {
        return Err(Error::StepTooLarge { dt: dt.as_f64(), max_dt: max_dt.as_f64() });
    }
    Ok(())
}

fn require_zero_temperature<T: Real>(params: &SystemParams<T>) -> Result<()> {
    if params.n_thermal != T::zero() {
        return Err(Error::NonZeroTemperature(params.n_thermal.as_f64()));
    }
    Ok(())
}

#[inline]
fn derivative<T: Real>(t: T, x: &AmplitudePair<T>, p: &SystemParams<T>) -> AmplitudePair<T> {
    let mi = minus_i::<T>();
    let half = T::lit(0.5);
    let damping = Complex::new(p.gamma_a * half, p.omega_a_prime());
    let drive = mi * phasor(-p.drive_frequency * t) * p.drive_amplitude;
    AmplitudePair::new(
        drive + mi * x.b * p.g - damping * x.a,
        mi * (x.a * p.g + x.b * p.omega_b),
    )
}

/// Time derivative of the amplitudes.
pub fn rhs<T: Real>(
    t: T,
    state: &AmplitudePair<T>,
    params: &SystemParams<T>,
) -> Result<AmplitudePair<T>> {
    require_zero_temperature(params)?;
    Ok(derivative(t, state, params))
}

fn rk4_step<T: Real>(t: T, x: &AmplitudePair<T>, dt: T, p: &SystemParams<T>) -> AmplitudePair<T> {
    let half = T::lit(0.5);
    let axpy = |x: &AmplitudePair<T>, k: T, d: &AmplitudePair<T>| {
        AmplitudePair::new(x.a + d.a * k, x.b + d.b * k)
    };
    let k1 = derivative(t, x, p);
    let k2 = derivative(t + half * dt, &axpy(x, half * dt, &k1), p);
    let k3 = derivative(t + half * dt, &axpy(x, half * dt, &k2), p);
    let k4 = derivative(t + dt, &axpy(x, dt, &k3), p);
    let w = dt / T::lit(6.0);
    let two = T::lit(2.0);
    AmplitudePair::new(
        x.a + (k1.a + k2.a * two + k3.a * two + k4.a) * w,
        x.b + (k1.b + k2.b * two + k3.b * two + k4.b) * w,
    )
}

/// Raw RK4 trajectory, one state per sample.
pub fn integrate_states<T: Real>(
    params: &SystemParams<T>,
    initial: AmplitudePair<T>,
    t_final: T,
    dt: T,
) -> Result<Vec<MeanFieldState<T>>> {
    require_zero_temperature(params)?;
    let times = sample_times(t_final, dt)?;
    check_step(params, dt)?;
    let mut out = Vec::with_capacity(times.len());
    let mut x = initial;
    out.push(MeanFieldState { t: times[0], amplitudes: x });
    for w in times.windows(2) {
        x = rk4_step(w[0], &x, dt, params);
        out.push(MeanFieldState { t: w[1], amplitudes: x });
    }
    Ok(out)
}

/// Fixed-step classical RK4 integration sampled every `dt`.
pub fn integrate<T: Real>(
    params: &SystemParams<T>,
    initial: AmplitudePair<T>,
    t_final: T,
    dt: T,
) -> Result<TimeSeries<T>> {
    Ok(annotate(&integrate_states(params, initial, t_final, dt)?, params))
}

/// Generator `M` and source `c` of the rotating-frame system `dx/dt = M x + c`.
pub fn rotating_generator<T: Real>(params: &SystemParams<T>) -> (Mat2<T>, [Cplx<T>; 2]) {
    let half = T::lit(0.5);
    let wf = params.drive_frequency;
    let m = Mat2::new(
        Complex::new(-params.gamma_a * half, -(params.omega_a_prime() - wf)),
        Complex::new(T::zero(), -params.g),
        Complex::new(T::zero(), -params.g),
        Complex::new(T::zero(), -(params.omega_b - wf)),
    );
    let c = [Complex::new(T::zero(), -params.drive_amplitude), Complex::new(T::zero(), T::zero())];
    (m, c)
}

/// Rotating-frame fixed point `x_ss = −M⁻¹ c`.
///
/// With `g = 0` the undriven battery decouples and its fixed point is zero
/// even when it is resonant with the drive.
fn fixed_point<T: Real>(params: &SystemParams<T>) -> Result<[Cplx<T>; 2]> {
    let (m, c) = rotating_generator(params);
    if params.g == T::zero() {
        let m11 = m.m[0][0];
        if m11.norm() == T::zero() {
            return Err(Error::SecularGrowth);
        }
        return Ok([-c[0] / m11, Cplx::new(T::zero(), T::zero())]);
    }
    let x = m.solve(c).ok_or(Error::SecularGrowth)?;
    Ok([-x[0], -x[1]])
}

/// Exact propagator for the amplitude equations.
///
/// Built once per parameter set; evaluating it at many times shares the
/// fixed point.
#[derive(Debug, Clone, Copy)]
pub struct ClosedForm<T> {
    generator: Mat2<T>,
    fixed_point: [Cplx<T>; 2],
    drive_frequency: T,
    initial: AmplitudePair<T>,
}

impl<T: Real> ClosedForm<T> {
    pub fn new(params: &SystemParams<T>, initial: AmplitudePair<T>) -> Result<Self> {
        require_zero_temperature(params)?;
        let (generator, _) = rotating_generator(params);
        Ok(Self {
            generator,
            fixed_point: fixed_point(params)?,
            drive_frequency: params.drive_frequency,
            initial,
        })
    }

    /// Lab-frame amplitudes at time `t`.
    pub fn at(&self, t: T) -> AmplitudePair<T> {
        let ss = self.fixed_point;
        let offset = [self.initial.a - ss[0], self.initial.b - ss[1]];
        let x = self.generator.exp_scaled(t).apply(offset);
        let back = phasor(-self.drive_frequency * t);
        AmplitudePair::new((x[0] + ss[0]) * back, (x[1] + ss[1]) * back)
    }
}

/// Exact lab-frame amplitudes at time `t`.
pub fn closed_form<T: Real>(
    params: &SystemParams<T>,
    initial: AmplitudePair<T>,
    t: T,
) -> Result<AmplitudePair<T>> {
    Ok(ClosedForm::new(params, initial)?.at(t))
}

/// Exact trajectory on the same grid [`integrate`] would use.
pub fn closed_form_series<T: Real>(
    params: &SystemParams<T>,
    initial: AmplitudePair<T>,
    t_final: T,
    dt: T,
) -> Result<TimeSeries<T>> {
    let exact = ClosedForm::new(params, initial)?;
    let states: Vec<_> = sample_times(t_final, dt)?
        .into_iter()
        .map(|t| MeanFieldState { t, amplitudes: exact.at(t) })
        .collect();
    Ok(annotate(&states, params))
}

/// Rotating-frame steady state of the damped, driven pair.
pub fn steady_state<T: Real>(params: &SystemParams<T>) -> Result<AmplitudePair<T>> {
    if params.gamma_a <= T::zero() {
        return Err(Error::NoSteadyState);
    }
    let x = fixed_point(params)?;
    Ok(AmplitudePair::new(x[0], x[1]))
}

/// Default mean-field engine: the exact solution, falling back to RK4 when
/// an undamped resonant drive leaves no fixed point.
pub fn simulate<T: Real>(
    params: &SystemParams<T>,
    initial: AmplitudePair<T>,
    t_final: T,
    dt: T,
) -> Result<TimeSeries<T>> {
    match closed_form_series(params, initial, t_final, dt) {
        Err(Error::SecularGrowth) => integrate(params, initial, t_final, dt),
        other => other,
    }
}
