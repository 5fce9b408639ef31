//! Full Lindblad master-equation oracle on a truncated two-mode Fock space.
//!
//! The state is propagated in the frame rotating at the drive frequency,
//! where the Hamiltonian is static:
//!
//! ```text
//! H = (ω_a' − ω_f) a†a + (ω_b − ω_f) b†b + g (a b† + b a†) + F (a + a†)
//! dρ/dt = −i[H, ρ] + γ_a (N+1) D[a]ρ + γ_a N D[a†]ρ
//! ```
//!
//! The Lamb-shift commutator `−iΔ_L [a†a, ρ]` is either folded into the
//! charger frequency (`ω_a' = ω_a + Δ_L`, the default) or applied as a
//! separate term next to the bare `ω_a a†a`. Both forms are exactly the same
//! generator, which the test-suite exercises.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{apply_terms, CMatrix, SparseMatrix, Term};
use crate::meanfield::{check_step, sample_times, MeanFieldState, TimeSeries};
use crate::model::{AmplitudePair, SystemParams};
use crate::num::{phasor, Cplx, Real};

/// Truncated product basis `|n_a, n_b⟩`, `0 ≤ n_a ≤ cutoff_a`, `0 ≤ n_b ≤ cutoff_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockBasis {
    cutoff_a: usize,
    cutoff_b: usize,
}

impl FockBasis {
    pub fn new(cutoff_a: usize, cutoff_b: usize) -> Result<Self> {
        if cutoff_a < 1 || cutoff_b < 1 {
            return Err(Error::InvalidBasis(format!(
                "cutoffs must be at least 1, got ({cutoff_a}, {cutoff_b})"
            )));
        }
        Ok(Self { cutoff_a, cutoff_b })
    }

    pub fn cutoff_a(&self) -> usize {
        self.cutoff_a
    }

    pub fn cutoff_b(&self) -> usize {
        self.cutoff_b
    }

    pub fn dim(&self) -> usize {
        (self.cutoff_a + 1) * (self.cutoff_b + 1)
    }

    /// Flat index `n_a (cutoff_b + 1) + n_b`.
    #[inline]
    pub fn index(&self, n_a: usize, n_b: usize) -> usize {
        debug_assert!(n_a <= self.cutoff_a && n_b <= self.cutoff_b);
        n_a * (self.cutoff_b + 1) + n_b
    }

    #[inline]
    pub fn occupations(&self, flat: usize) -> (usize, usize) {
        (flat / (self.cutoff_b + 1), flat % (self.cutoff_b + 1))
    }

    /// Basis with both cutoffs doubled.
    pub fn doubled(&self) -> Self {
        Self { cutoff_a: 2 * self.cutoff_a, cutoff_b: 2 * self.cutoff_b }
    }
}

/// Ladder and number operators on a [`FockBasis`].
#[derive(Debug, Clone)]
pub struct Operators<T> {
    pub a: SparseMatrix<T>,
    pub a_dagger: SparseMatrix<T>,
    pub b: SparseMatrix<T>,
    pub b_dagger: SparseMatrix<T>,
    pub number_a: SparseMatrix<T>,
    pub number_b: SparseMatrix<T>,
}

pub fn build_operators<T: Real>(basis: &FockBasis) -> Operators<T> {
    let dim = basis.dim();
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut na = Vec::new();
    let mut nb = Vec::new();
    for flat in 0..dim {
        let (n_a, n_b) = basis.occupations(flat);
        if n_a > 0 {
            let amp = T::from_usize_exact(n_a).sqrt();
            a.push((basis.index(n_a - 1, n_b), flat, Complex::new(amp, T::zero())));
        }
        if n_b > 0 {
            let amp = T::from_usize_exact(n_b).sqrt();
            b.push((basis.index(n_a, n_b - 1), flat, Complex::new(amp, T::zero())));
        }
        na.push((flat, flat, Complex::new(T::from_usize_exact(n_a), T::zero())));
        nb.push((flat, flat, Complex::new(T::from_usize_exact(n_b), T::zero())));
    }
    let a = SparseMatrix::from_triplets(dim, a);
    let b = SparseMatrix::from_triplets(dim, b);
    Operators {
        a_dagger: a.adjoint(),
        b_dagger: b.adjoint(),
        a,
        b,
        number_a: SparseMatrix::from_triplets(dim, na),
        number_b: SparseMatrix::from_triplets(dim, nb),
    }
}

fn real<T: Real>(x: T) -> Cplx<T> {
    Complex::new(x, T::zero())
}

/// Static Hamiltonian in the frame rotating at `ω_f`, Lamb shift absorbed.
pub fn rotating_frame_hamiltonian<T: Real>(
    params: &SystemParams<T>,
    basis: &FockBasis,
) -> SparseMatrix<T> {
    let ops = build_operators::<T>(basis);
    hamiltonian_from(params, params.omega_a_prime(), basis, &ops)
}

fn hamiltonian_from<T: Real>(
    params: &SystemParams<T>,
    charger_frequency: T,
    basis: &FockBasis,
    ops: &Operators<T>,
) -> SparseMatrix<T> {
    let wf = params.drive_frequency;
    let hop_ab = ops.a.matmul(&ops.b_dagger);
    let hop_ba = ops.b.matmul(&ops.a_dagger);
    SparseMatrix::combine(
        basis.dim(),
        &[
            (real(charger_frequency - wf), &ops.number_a),
            (real(params.omega_b - wf), &ops.number_b),
            (real(params.g), &hop_ab),
            (real(params.g), &hop_ba),
            (real(params.drive_amplitude), &ops.a),
            (real(params.drive_amplitude), &ops.a_dagger),
        ],
    )
}

/// How the Lamb shift enters the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambShift {
    /// `ω_a' a†a` in the Hamiltonian.
    #[default]
    Absorbed,
    /// Bare `ω_a a†a` plus a separate `−iΔ_L [a†a, ρ]`.
    Explicit,
}

/// Precomputed Lindblad generator.
///
/// Stored as `dρ/dt = −i H_eff ρ + i ρ H_eff† + Σ_k r_k c_k ρ c_k†` with
/// `H_eff = H − (i/2) Σ_k r_k c_k† c_k`.
#[derive(Debug, Clone)]
pub struct Liouvillian<T> {
    basis: FockBasis,
    h_eff: SparseMatrix<T>,
    h_eff_dagger: SparseMatrix<T>,
    jumps: Vec<(T, SparseMatrix<T>, SparseMatrix<T>)>,
    lamb: Option<(T, SparseMatrix<T>)>,
}

impl<T: Real> Liouvillian<T> {
    pub fn new(params: &SystemParams<T>, basis: &FockBasis, lamb: LambShift) -> Self {
        let ops = build_operators::<T>(basis);
        let (charger_frequency, lamb) = match lamb {
            LambShift::Absorbed => (params.omega_a_prime(), None),
            LambShift::Explicit => {
                (params.omega_a, Some((params.lamb_shift, ops.number_a.clone())))
            }
        };
        let h = hamiltonian_from(params, charger_frequency, basis, &ops);

        let mut jumps = Vec::new();
        let n = params.n_thermal;
        let emission = params.gamma_a * (n + T::one());
        let absorption = params.gamma_a * n;
        if emission != T::zero() {
            jumps.push((emission, ops.a.clone(), ops.a_dagger.clone()));
        }
        if absorption != T::zero() {
            jumps.push((absorption, ops.a_dagger.clone(), ops.a.clone()));
        }

        let half = T::lit(0.5);
        let products: Vec<SparseMatrix<T>> =
            jumps.iter().map(|(_, c, cd)| cd.matmul(c)).collect();
        let mut terms: Vec<(Cplx<T>, &SparseMatrix<T>)> = vec![(Cplx::one(), &h)];
        for ((rate, _, _), cdc) in jumps.iter().zip(&products) {
            terms.push((Complex::new(T::zero(), -half * *rate), cdc));
        }
        let h_eff = SparseMatrix::combine(basis.dim(), &terms);
        Self { basis: *basis, h_eff_dagger: h_eff.adjoint(), h_eff, jumps, lamb }
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    /// Writes `L(rho)` into `out`.
    pub fn apply_into(&self, rho: &CMatrix<T>, out: &mut CMatrix<T>) {
        let i = Complex::new(T::zero(), T::one());
        let mut terms = vec![Term::Left(-i, &self.h_eff), Term::Right(i, &self.h_eff_dagger)];
        for (rate, c, cd) in &self.jumps {
            terms.push(Term::Sandwich(real(*rate), c, cd));
        }
        if let Some((shift, number)) = &self.lamb {
            terms.push(Term::Left(-i * *shift, number));
            terms.push(Term::Right(i * *shift, number));
        }
        apply_terms(&terms, rho, out);
    }

    pub fn apply(&self, rho: &CMatrix<T>) -> CMatrix<T> {
        let mut out = CMatrix::zeros(rho.dim());
        self.apply_into(rho, &mut out);
        out
    }
}

/// Density matrix on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    pub basis: FockBasis,
    pub elements: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(basis: FockBasis, elements: CMatrix<T>) -> Result<Self> {
        if elements.dim() != basis.dim() {
            return Err(Error::InvalidBasis(format!(
                "matrix dimension {} does not match basis dimension {}",
                elements.dim(),
                basis.dim()
            )));
        }
        Ok(Self { basis, elements })
    }

    /// `|n_a, n_b⟩⟨n_a, n_b|`.
    pub fn fock(basis: FockBasis, n_a: usize, n_b: usize) -> Self {
        let mut m = CMatrix::zeros(basis.dim());
        let k = basis.index(n_a, n_b);
        m[(k, k)] = Cplx::one();
        Self { basis, elements: m }
    }

    pub fn vacuum(basis: FockBasis) -> Self {
        Self::fock(basis, 0, 0)
    }

    pub fn trace(&self) -> Cplx<T> {
        self.elements.trace()
    }

    pub fn hermiticity_error(&self) -> T {
        self.elements.hermiticity_error()
    }

    pub fn min_diagonal(&self) -> T {
        (0..self.basis.dim())
            .map(|k| self.elements[(k, k)].re)
            .fold(T::infinity(), T::min)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn smallest_eigenvalue(&self) -> T {
        let n = self.basis.dim();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let z = (self.elements[(i, j)] + self.elements[(j, i)].conj()) * T::lit(0.5);
            Complex::new(z.re.as_f64(), z.im.as_f64())
        });
        let smallest = m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        T::lit(smallest)
    }
}

/// `dρ/dt` for the rotating-frame master equation.
pub fn lindblad_rhs<T: Real>(
    rho: &DensityMatrix<T>,
    params: &SystemParams<T>,
    basis: &FockBasis,
) -> CMatrix<T> {
    Liouvillian::new(params, basis, LambShift::Absorbed).apply(&rho.elements)
}

/// `Tr(ρ · op)`.
pub fn expectation<T: Real>(rho: &DensityMatrix<T>, op: &CMatrix<T>) -> Cplx<T> {
    rho.elements.trace_product(op)
}

/// `Tr(ρ · op)` for a sparse operator.
pub fn expectation_sparse<T: Real>(rho: &DensityMatrix<T>, op: &SparseMatrix<T>) -> Cplx<T> {
    op.triplets()
        .fold(Cplx::zero(), |acc, (i, j, v)| acc + v * rho.elements[(j, i)])
}

/// Population of states at either cutoff.
pub fn truncation_tail<T: Real>(rho: &DensityMatrix<T>) -> T {
    let basis = rho.basis;
    (0..basis.dim())
        .filter(|&k| {
            let (n_a, n_b) = basis.occupations(k);
            n_a == basis.cutoff_a() || n_b == basis.cutoff_b()
        })
        .map(|k| rho.elements[(k, k)].re)
        .fold(T::zero(), |a, b| a + b)
}

/// Propagation settings for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions<T> {
    /// Keep every `sample_stride`-th step (≥ 1).
    pub sample_stride: usize,
    pub lamb: LambShift,
    /// Largest tolerated `|Tr ρ − 1|`.
    pub trace_tolerance: T,
    /// Most negative tolerated diagonal entry.
    pub diagonal_tolerance: T,
}

impl<T: Real> Default for EvolveOptions<T> {
    fn default() -> Self {
        Self {
            sample_stride: 1,
            lamb: LambShift::Absorbed,
            trace_tolerance: T::lit(1e-6),
            diagonal_tolerance: T::lit(1e-8),
        }
    }
}

impl<T: Real> EvolveOptions<T> {
    pub fn with_stride(mut self, stride: usize) -> Self {
        self.sample_stride = stride;
        self
    }

    pub fn with_lamb(mut self, lamb: LambShift) -> Self {
        self.lamb = lamb;
        self
    }
}

fn add_scaled<T: Real>(out: &mut CMatrix<T>, k: Cplx<T>, y: &CMatrix<T>) {
    for (o, b) in out.as_mut_slice().iter_mut().zip(y.as_slice()) {
        *o += b * k;
    }
}

fn combine_into<T: Real>(out: &mut CMatrix<T>, x: &CMatrix<T>, k: Cplx<T>, y: &CMatrix<T>) {
    for ((o, a), b) in out.as_mut_slice().iter_mut().zip(x.as_slice()).zip(y.as_slice()) {
        *o = a + b * k;
    }
}

/// RK4 propagation, handing every sampled rotating-frame state to `observe`.
///
/// Samples are taken every `sample_stride` steps starting at `t = 0`.
pub fn evolve_with<T: Real>(
    rho0: &DensityMatrix<T>,
    params: &SystemParams<T>,
    t_final: T,
    dt: T,
    options: &EvolveOptions<T>,
    mut observe: impl FnMut(T, &DensityMatrix<T>),
) -> Result<()> {
    let times = sample_times(t_final, dt)?;
    check_step(params, dt)?;
    if options.sample_stride == 0 {
        return Err(Error::InvalidTimeGrid("sample stride must be at least 1".into()));
    }
    let basis = rho0.basis;
    let generator = Liouvillian::new(params, &basis, options.lamb);
    let n = basis.dim();

    let mut rho = rho0.clone();
    let mut stage = CMatrix::zeros(n);
    let mut acc = CMatrix::zeros(n);
    let mut k = CMatrix::zeros(n);

    let h = Complex::new(dt * T::lit(0.5), T::zero());
    let sixth = Complex::new(dt / T::lit(6.0), T::zero());
    let third = Complex::new(dt / T::lit(3.0), T::zero());
    let full = Complex::new(dt, T::zero());

    observe(times[0], &rho);
    for (step, &t) in times.iter().enumerate().skip(1) {
        let x = &rho.elements;
        generator.apply_into(x, &mut k);
        combine_into(&mut acc, x, sixth, &k);
        combine_into(&mut stage, x, h, &k);
        generator.apply_into(&stage, &mut k);
        add_scaled(&mut acc, third, &k);
        combine_into(&mut stage, x, h, &k);
        generator.apply_into(&stage, &mut k);
        add_scaled(&mut acc, third, &k);
        combine_into(&mut stage, x, full, &k);
        generator.apply_into(&stage, &mut k);
        combine_into(&mut rho.elements, &acc, sixth, &k);

        let drift = (rho.trace() - Cplx::one()).norm();
        if drift.is_nan() || drift > options.trace_tolerance {
            return Err(Error::TruncationFailure(format!("trace drift {drift} at t = {t}")));
        }
        let min_diag = rho.min_diagonal();
        if min_diag < -options.diagonal_tolerance {
            return Err(Error::TruncationFailure(format!(
                "negative population {min_diag} at t = {t}"
            )));
        }
        if step % options.sample_stride == 0 {
            observe(t, &rho);
        }
    }
    Ok(())
}

/// RK4 propagation of the master equation, collecting sampled states.
pub fn evolve<T: Real>(
    rho0: &DensityMatrix<T>,
    params: &SystemParams<T>,
    t_final: T,
    dt: T,
    options: &EvolveOptions<T>,
) -> Result<Vec<(T, DensityMatrix<T>)>> {
    let mut out = Vec::new();
    evolve_with(rho0, params, t_final, dt, options, |t, rho| out.push((t, rho.clone())))?;
    Ok(out)
}

/// Per-sample health of an oracle run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics<T> {
    pub trace_err: T,
    pub trunc_tail: T,
}

/// Lab-frame moments and diagnostics of an oracle run.
#[derive(Debug, Clone)]
pub struct OracleRun<T> {
    pub series: TimeSeries<T>,
    pub diagnostics: Vec<Diagnostics<T>>,
    pub final_state: DensityMatrix<T>,
    pub max_hermiticity_error: T,
}

impl<T: Real> OracleRun<T> {
    pub fn max_trace_error(&self) -> T {
        self.diagnostics.iter().fold(T::zero(), |m, d| m.max(d.trace_err))
    }

    pub fn max_truncation_tail(&self) -> T {
        self.diagnostics.iter().fold(T::zero(), |m, d| m.max(d.trunc_tail))
    }
}

/// Runs the oracle and reduces every sample to `⟨a⟩`, `⟨b⟩` in the lab
/// frame, `⟨x⟩_lab = e^{−i ω_f t} Tr(ρ x)`.
pub fn simulate<T: Real>(
    rho0: &DensityMatrix<T>,
    params: &SystemParams<T>,
    t_final: T,
    dt: T,
    options: &EvolveOptions<T>,
) -> Result<OracleRun<T>> {
    let ops = build_operators::<T>(&rho0.basis);
    let mut states = Vec::new();
    let mut diagnostics = Vec::new();
    let mut last = None;
    let mut herm = T::zero();
    evolve_with(rho0, params, t_final, dt, options, |t, rho| {
        let back = phasor(-params.drive_frequency * t);
        let a = expectation_sparse(rho, &ops.a) * back;
        let b = expectation_sparse(rho, &ops.b) * back;
        states.push(MeanFieldState { t, amplitudes: AmplitudePair::new(a, b) });
        diagnostics.push(Diagnostics {
            trace_err: (rho.trace() - Cplx::one()).norm(),
            trunc_tail: truncation_tail(rho),
        });
        herm = herm.max(rho.hermiticity_error());
        last = Some(rho.clone());
    })?;
    Ok(OracleRun {
        series: crate::ergotropy::annotate(&states, params),
        diagnostics,
        final_state: last.expect("at least the initial sample"),
        max_hermiticity_error: herm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

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

    fn random_hermitian(n: usize, seed: u64) -> CMatrix<f64> {
        // small LCG keeps the fixture deterministic
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let raw = CMatrix::from_fn(n, |_, _| c(next(), next()));
        raw.axpy(c(1.0, 0.0), &raw.adjoint()).scale(c(0.5, 0.0))
    }

    #[test]
    fn basis_index_is_bijective() {
        let basis = FockBasis::new(3, 2).unwrap();
        assert_eq!(basis.dim(), 12);
        for flat in 0..basis.dim() {
            let (na, nb) = basis.occupations(flat);
            assert_eq!(basis.index(na, nb), flat);
        }
        assert!(FockBasis::new(0, 3).is_err());
    }

    #[test]
    fn two_level_ladder() {
        let basis = FockBasis::new(1, 1).unwrap();
        let ops = build_operators::<f64>(&basis);
        let a = ops.a.to_dense();
        // restrict to n_b = 0: rows/cols {|0,0⟩, |1,0⟩}
        let (i0, i1) = (basis.index(0, 0), basis.index(1, 0));
        assert_eq!([a[(i0, i0)], a[(i0, i1)], a[(i1, i0)], a[(i1, i1)]], [
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0)
        ]);
        assert_eq!(ops.a_dagger.to_dense(), a.adjoint());
    }

    #[test]
    fn commutators() {
        let basis = FockBasis::new(4, 3).unwrap();
        let ops = build_operators::<f64>(&basis);
        let (a, ad) = (ops.a.to_dense(), ops.a_dagger.to_dense());
        let comm = a.matmul(&ad).sub(&ad.matmul(&a));
        for i in 0..basis.dim() {
            for j in 0..basis.dim() {
                let (na, _) = basis.occupations(i);
                if na < basis.cutoff_a() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!((comm[(i, j)] - c(expected, 0.0)).norm(), 0.0, epsilon = 1e-14);
                }
            }
        }
        let bd = ops.b_dagger.to_dense();
        assert_eq!(a.matmul(&bd).sub(&bd.matmul(&a)).max_abs(), 0.0);
        let na = ops.number_a.to_dense();
        assert!(ad.matmul(&a).sub(&na).max_abs() < 1e-14);
    }

    #[test]
    fn fully_resonant_frame_is_zero() {
        let p = SystemParams { drive_amplitude: 0.0, g: 0.0, drive_frequency: 1.0, ..fig1() };
        let h = rotating_frame_hamiltonian(&p, &FockBasis::new(3, 3).unwrap());
        assert_eq!(h.nnz(), 0);
    }

    #[test]
    fn lower_mode_frame_detunings() {
        let basis = FockBasis::new(2, 2).unwrap();
        let h = rotating_frame_hamiltonian(&fig1(), &basis).to_dense();
        let one_a = basis.index(1, 0);
        let one_b = basis.index(0, 1);
        assert_abs_diff_eq!(h[(one_a, one_a)].re, 0.16, epsilon = 1e-15);
        assert_abs_diff_eq!(h[(one_b, one_b)].re, 0.16, epsilon = 1e-15);
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let basis = FockBasis::new(4, 3).unwrap();
        for k in 0..100 {
            let x = k as f64 / 100.0;
            let p = SystemParams {
                g: 0.1 + 1.5 * x,
                lamb_shift: 0.3 * (x - 0.5),
                drive_amplitude: x,
                omega_b: 0.5 + x,
                drive_frequency: 2.0 * x - 0.3,
                ..fig1()
            };
            let h = rotating_frame_hamiltonian(&p, &basis).to_dense();
            assert!(h.hermiticity_error() < 1e-14);
        }
    }

    #[test]
    fn vacuum_is_stationary_without_drive() {
        let basis = FockBasis::new(3, 3).unwrap();
        let p = SystemParams { drive_amplitude: 0.0, ..fig1() };
        let d = lindblad_rhs(&DensityMatrix::vacuum(basis), &p, &basis);
        assert_eq!(d.max_abs(), 0.0);
    }

    #[test]
    fn pure_decay_channel() {
        let basis = FockBasis::new(2, 1).unwrap();
        let p = SystemParams { drive_amplitude: 0.0, g: 0.0, ..fig1() };
        let d = lindblad_rhs(&DensityMatrix::fock(basis, 1, 0), &p, &basis);
        let (i1, i0) = (basis.index(1, 0), basis.index(0, 0));
        assert_abs_diff_eq!(d[(i1, i1)].re, -0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(d[(i0, i0)].re, 0.05, epsilon = 1e-15);
    }

    #[test]
    fn generator_is_trace_free() {
        let basis = FockBasis::new(4, 3).unwrap();
        let p = SystemParams { n_thermal: 0.7, lamb_shift: 0.1, ..fig1() };
        for seed in 0..5 {
            let rho = DensityMatrix::new(basis, random_hermitian(basis.dim(), seed)).unwrap();
            let d = lindblad_rhs(&rho, &p, &basis);
            assert!(d.trace().norm() < 1e-12);
        }
    }

    #[test]
    fn lamb_shift_forms_give_same_generator() {
        let basis = FockBasis::new(4, 3).unwrap();
        let p = SystemParams { n_thermal: 0.2, lamb_shift: 0.1, ..fig1() };
        let rho = random_hermitian(basis.dim(), 7);
        let absorbed = Liouvillian::new(&p, &basis, LambShift::Absorbed).apply(&rho);
        let explicit = Liouvillian::new(&p, &basis, LambShift::Explicit).apply(&rho);
        assert!(absorbed.sub(&explicit).max_abs() < 1e-13);
    }

    #[test]
    fn generator_matches_dense_definition() {
        let basis = FockBasis::new(3, 2).unwrap();
        let p = SystemParams { n_thermal: 0.4, lamb_shift: -0.1, ..fig1() };
        let rho = random_hermitian(basis.dim(), 3);
        let ops = build_operators::<f64>(&basis);
        let h = rotating_frame_hamiltonian(&p, &basis).to_dense();
        let (a, ad) = (ops.a.to_dense(), ops.a_dagger.to_dense());
        let dissipator = |jump: &CMatrix<f64>, cd: &CMatrix<f64>| {
            let cdc = cd.matmul(jump);
            jump.matmul(&rho)
                .matmul(cd)
                .axpy(c(-0.5, 0.0), &cdc.matmul(&rho))
                .axpy(c(-0.5, 0.0), &rho.matmul(&cdc))
        };
        let comm = h.matmul(&rho).sub(&rho.matmul(&h));
        let expected = comm
            .scale(c(0.0, -1.0))
            .axpy(c(0.05 * 1.4, 0.0), &dissipator(&a, &ad))
            .axpy(c(0.05 * 0.4, 0.0), &dissipator(&ad, &a));
        let got = lindblad_rhs(&DensityMatrix::new(basis, rho.clone()).unwrap(), &p, &basis);
        assert!(got.sub(&expected).max_abs() < 1e-13);
    }

    #[test]
    fn undriven_vacuum_stays_put() {
        let basis = FockBasis::new(3, 3).unwrap();
        let p = SystemParams { drive_amplitude: 0.0, ..fig1() };
        let states = evolve(&DensityMatrix::vacuum(basis), &p, 20.0, 0.05, &EvolveOptions::default()).unwrap();
        for (_, rho) in states {
            assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-12);
            assert_eq!(rho, DensityMatrix::vacuum(basis));
        }
    }

    #[test]
    fn short_time_displacement() {
        let basis = FockBasis::new(6, 1).unwrap();
        let p = SystemParams { g: 0.0, gamma_a: 0.0, drive_frequency: 1.0, ..fig1() };
        let tau = 0.05;
        let ops = build_operators::<f64>(&basis);
        let states = evolve(&DensityMatrix::vacuum(basis), &p, tau, tau / 10.0, &EvolveOptions::default()).unwrap();
        let (_, rho) = states.last().unwrap();
        let a = expectation(rho, &ops.a.to_dense());
        assert!((a - c(0.0, -0.1 * tau)).norm() < 1e-6);
        assert_eq!(expectation_sparse(rho, &ops.a), a);
    }

    #[test]
    fn expectation_basics() {
        let basis = FockBasis::new(2, 2).unwrap();
        let ops = build_operators::<f64>(&basis);
        let vac = DensityMatrix::vacuum(basis);
        assert_eq!(expectation(&vac, &ops.number_a.to_dense()), c(0.0, 0.0));
        assert_eq!(expectation(&vac, &CMatrix::identity(basis.dim())), c(1.0, 0.0));
    }

    #[test]
    fn tail_of_simple_states() {
        let basis = FockBasis::new(3, 2).unwrap();
        assert_eq!(truncation_tail(&DensityMatrix::<f64>::vacuum(basis)), 0.0);
        assert_eq!(truncation_tail(&DensityMatrix::<f64>::fock(basis, 3, 0)), 1.0);
        assert_eq!(truncation_tail(&DensityMatrix::<f64>::fock(basis, 1, 2)), 1.0);
    }

    #[test]
    fn step_failure_is_reported() {
        let basis = FockBasis::new(1, 1).unwrap();
        let p = SystemParams { drive_amplitude: 5.0, gamma_a: 0.0, ..fig1() };
        let opts = EvolveOptions { trace_tolerance: -1.0, ..EvolveOptions::default() };
        let err = evolve(&DensityMatrix::vacuum(basis), &p, 1.0, 0.05, &opts).unwrap_err();
        assert!(err.to_string().contains("increase cutoff or decrease dt"));
        let err = evolve(&DensityMatrix::vacuum(basis), &p, 1.0, 0.5, &EvolveOptions::default());
        assert!(matches!(err, Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn smallest_eigenvalue_of_mixture() {
        let basis = FockBasis::new(1, 1).unwrap();
        let mut m = CMatrix::zeros(basis.dim());
        m[(0, 0)] = c(0.75, 0.0);
        m[(1, 1)] = c(0.25, 0.0);
        let rho = DensityMatrix::new(basis, m).unwrap();
        assert_abs_diff_eq!(rho.smallest_eigenvalue(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.min_diagonal(), 0.0, epsilon = 1e-15);
    }
}
