//! Small complex linear algebra: a closed-form 2×2 matrix type for the
//! mean-field propagator, and row-major dense/CSR matrices for the
//! density-matrix oracle.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::num::{Cplx, Real};

/// 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T> {
    pub m: [[Cplx<T>; 2]; 2],
}

impl<T: Real> Mat2<T> {
    pub fn new(m11: Cplx<T>, m12: Cplx<T>, m21: Cplx<T>, m22: Cplx<T>) -> Self {
        Self { m: [[m11, m12], [m21, m22]] }
    }

    pub fn identity() -> Self {
        let (o, z) = (Cplx::one(), Cplx::zero());
        Self::new(o, z, z, o)
    }

    pub fn trace(&self) -> Cplx<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn determinant(&self) -> Cplx<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.m
            .iter()
            .flatten()
            .fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn scale(&self, k: Cplx<T>) -> Self {
        let m = self.m;
        Self::new(m[0][0] * k, m[0][1] * k, m[1][0] * k, m[1][1] * k)
    }

    pub fn apply(&self, v: [Cplx<T>; 2]) -> [Cplx<T>; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// True when the determinant vanishes relative to the matrix scale.
    pub fn is_singular(&self) -> bool {
        let scale = self.max_abs();
        self.determinant().norm() <= T::lit(64.0) * T::epsilon() * scale * scale
    }

    /// Solves `self · x = rhs` by Cramer's rule; `None` when singular.
    pub fn solve(&self, rhs: [Cplx<T>; 2]) -> Option<[Cplx<T>; 2]> {
        if self.is_singular() {
            return None;
        }
        let det = self.determinant();
        let m = self.m;
        Some([
            (m[1][1] * rhs[0] - m[0][1] * rhs[1]) / det,
            (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det,
        ])
    }

    /// `exp(self · t)` from the spectral decomposition of a 2×2 matrix.
    ///
    /// With eigenvalues `s ± q` (`s = tr/2`, `q² = s² − det`) the two
    /// spectral projectors combine into
    /// `exp(Mt) = e^{st} [cosh(qt) I + t sinh(qt)/(qt) (M − sI)]`,
    /// which stays finite when the eigenvalues coalesce.
    pub fn exp_scaled(&self, t: T) -> Self {
        let two = T::lit(2.0);
        let s = self.trace() / two;
        let q = (s * s - self.determinant()).sqrt();
        let z = q * t;
        let sinhc = if z.norm() < T::lit(1e-4) {
            let z2 = z * z;
            Cplx::<T>::one() + z2 / T::lit(6.0) + z2 * z2 / T::lit(120.0)
        } else {
            z.sinh() / z
        };
        let shifted = *self - Self::identity().scale(s);
        let e = (s * t).exp();
        (Self::identity().scale(z.cosh()) + shifted.scale(sinhc * t)).scale(e)
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (a, b) = (self.m, o.m);
        Self::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let (a, b) = (self.m, o.m);
        Self::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self.m, o.m);
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// Square dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<Cplx<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Cplx::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Cplx::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Cplx<T>) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Cplx<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Cplx<T>] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Cplx<T>] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn trace(&self) -> Cplx<T> {
        (0..self.dim).map(|i| self[(i, i)]).fold(Cplx::zero(), |a, b| a + b)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += aik * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// `self − other`.
    pub fn sub(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { dim: self.dim, data }
    }

    /// `self + k · other`.
    pub fn axpy(&self, k: Cplx<T>, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b * k).collect();
        Self { dim: self.dim, data }
    }

    pub fn scale(&self, k: Cplx<T>) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * k).collect() }
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Cplx<T> {
        let n = self.dim;
        let mut acc = Cplx::zero();
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        acc
    }

    /// Largest elementwise modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// `max |M − M†|` elementwise.
    pub fn hermiticity_error(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl<T> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Cplx<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Cplx<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cplx<T> {
        &mut self.data[i * self.dim + j]
    }
}

/// Square sparse complex matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Cplx<T>>,
}

impl<T: Real> SparseMatrix<T> {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, Cplx<T>)>) -> Self {
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut merged: Vec<(usize, usize, Cplx<T>)> = Vec::with_capacity(triplets.len());
        for (i, j, v) in triplets {
            assert!(i < dim && j < dim, "triplet ({i}, {j}) outside dimension {dim}");
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        merged.retain(|t| !t.2.is_zero());
        let mut row_ptr = vec![0; dim + 1];
        for &(i, _, _) in &merged {
            row_ptr[i + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            dim,
            row_ptr,
            cols: merged.iter().map(|t| t.1).collect(),
            vals: merged.iter().map(|t| t.2).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Stored `(row, col, value)` entries in row order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Cplx<T>)> + '_ {
        (0..self.dim).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, self.cols[k], self.vals[k]))
        })
    }

    pub fn to_dense(&self) -> CMatrix<T> {
        let mut m = CMatrix::zeros(self.dim);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(i, j, v)| (j, i, v.conj())).collect())
    }

    pub fn scale(&self, k: Cplx<T>) -> Self {
        Self { vals: self.vals.iter().map(|v| v * k).collect(), ..self.clone() }
    }

    /// Linear combination of sparse matrices.
    pub fn combine(dim: usize, terms: &[(Cplx<T>, &SparseMatrix<T>)]) -> Self {
        let triplets = terms
            .iter()
            .flat_map(|(k, m)| m.triplets().map(move |(i, j, v)| (i, j, v * k)))
            .collect();
        Self::from_triplets(dim, triplets)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let dense = self.to_dense().matmul(&other.to_dense());
        let triplets = (0..self.dim)
            .flat_map(|i| (0..self.dim).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, dense[(i, j)]))
            .collect();
        Self::from_triplets(self.dim, triplets)
    }

    /// Row `i` of `self · x`, accumulated into `out` with weight `k`.
    #[inline]
    fn left_row_into(&self, i: usize, x: &CMatrix<T>, k: Cplx<T>, out: &mut [Cplx<T>]) {
        for p in self.row_ptr[i]..self.row_ptr[i + 1] {
            let w = self.vals[p] * k;
            let xr = x.row(self.cols[p]);
            for (o, v) in out.iter_mut().zip(xr) {
                *o += w * v;
            }
        }
    }

    /// Row `i` of `x · self`, accumulated into `out` with weight `k`.
    #[inline]
    fn right_row_into(&self, i: usize, x: &CMatrix<T>, k: Cplx<T>, out: &mut [Cplx<T>]) {
        let xr = x.row(i);
        for (r, &xv) in xr.iter().enumerate() {
            if xv.is_zero() {
                continue;
            }
            let w = xv * k;
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                out[self.cols[p]] += w * self.vals[p];
            }
        }
    }
}

/// One term of a bilinear map `X ↦ Σ k · L X R` applied row by row.
pub enum Term<'a, T> {
    /// `k · L X`
    Left(Cplx<T>, &'a SparseMatrix<T>),
    /// `k · X R`
    Right(Cplx<T>, &'a SparseMatrix<T>),
    /// `k · L X R`
    Sandwich(Cplx<T>, &'a SparseMatrix<T>, &'a SparseMatrix<T>),
}

/// Evaluates `Σ terms(x)` into `out`, parallel over output rows.
///
/// Each output row is computed independently in a fixed order, so the
/// result does not depend on the number of worker threads.
pub fn apply_terms<T: Real>(terms: &[Term<'_, T>], x: &CMatrix<T>, out: &mut CMatrix<T>) {
    let n = x.dim();
    assert_eq!(out.dim(), n);
    out.as_mut_slice()
        .par_chunks_mut(n)
        .enumerate()
        .for_each_init(
            || vec![Complex::zero(); n],
            |scratch, (i, row)| {
                row.fill(Complex::zero());
                for term in terms {
                    match *term {
                        Term::Left(k, l) => l.left_row_into(i, x, k, row),
                        Term::Right(k, r) => r.right_row_into(i, x, k, row),
                        Term::Sandwich(k, l, r) => {
                            // row i of (L X) then times R
                            scratch.fill(Complex::zero());
                            l.left_row_into(i, x, Complex::one(), scratch);
                            for (c, &sv) in scratch.iter().enumerate() {
                                if sv.is_zero() {
                                    continue;
                                }
                                let w = sv * k;
                                for p in r.row_ptr[c]..r.row_ptr[c + 1] {
                                    row[r.cols[p]] += w * r.vals[p];
                                }
                            }
                        }
                    }
                }
            },
        );
}
