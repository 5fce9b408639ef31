//! Normal modes of the Lamb-shift-renormalized coupling matrix.
//!
//! The coupled Hamiltonian is `(a†, b†) G (a, b)ᵀ` plus the drive, with
//!
//! ```text
//! G = | ω_a'  g   |      ω_a' = ω_a + Δ_L
//!     | g     ω_b |
//! ```
//!
//! Diagonalising `G` yields two supermodes `C+ = sinα a + cosα b` and
//! `C− = cosα a − sinα b` with frequencies `λ±`. The drive, which couples
//! only to the charger, reaches them with weights `F sinα` and `F cosα`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::num::Real;

/// Which normal mode to address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const ALL: [Branch; 2] = [Branch::Minus, Branch::Plus];

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            other => Err(Error::Parse(format!("unknown branch `{other}` (expected plus|minus)"))),
        }
    }
}

/// Real symmetric 2×2 mode matrix `G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingMatrix<T> {
    pub m11: T,
    pub m12: T,
    pub m21: T,
    pub m22: T,
}

impl<T: Real> CouplingMatrix<T> {
    pub fn trace(&self) -> T {
        self.m11 + self.m22
    }

    pub fn determinant(&self) -> T {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// `G · v`.
    pub fn apply(&self, v: (T, T)) -> (T, T) {
        (self.m11 * v.0 + self.m12 * v.1, self.m21 * v.0 + self.m22 * v.1)
    }
}

/// Eigenfrequencies, mixing angle and effective drives of the two supermodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupermodeDecomposition<T> {
    pub lambda_plus: T,
    pub lambda_minus: T,
    pub sin_alpha: T,
    pub cos_alpha: T,
    /// Effective drive on `C+`, `F sinα`.
    pub drive_plus: T,
    /// Effective drive on `C−`, `F cosα`.
    pub drive_minus: T,
}

impl<T: Real> SupermodeDecomposition<T> {
    /// Eigenvector of `G` for `λ+`, `(sinα, cosα)`.
    pub fn v_plus(&self) -> (T, T) {
        (self.sin_alpha, self.cos_alpha)
    }

    /// Eigenvector of `G` for `λ−`, `(cosα, −sinα)`.
    pub fn v_minus(&self) -> (T, T) {
        (self.cos_alpha, -self.sin_alpha)
    }

    pub fn frequency(&self, branch: Branch) -> T {
        match branch {
            Branch::Plus => self.lambda_plus,
            Branch::Minus => self.lambda_minus,
        }
    }
}

pub fn coupling_matrix<T: Real>(params: &SystemParams<T>) -> CouplingMatrix<T> {
    CouplingMatrix {
        m11: params.omega_a_prime(),
        m12: params.g,
        m21: params.g,
        m22: params.omega_b,
    }
}

/// Closed-form eigenvalues `(λ+, λ−)` of a symmetric 2×2 matrix, `λ+ ≥ λ−`.
pub fn eigenfrequencies<T: Real>(g: &CouplingMatrix<T>) -> (T, T) {
    let two = T::lit(2.0);
    let mean = (g.m11 + g.m22) / two;
    let radius = ((g.m11 - g.m22) / two).hypot(g.m12);
    (mean + radius, mean - radius)
}

/// Supermode decomposition of the renormalized Hamiltonian.
///
/// The `λ+` eigenvector is `(ω_b − λ+, −g)` normalized, which fixes
/// `cosα < 0`. On resonance (`ω_a' = ω_b = ω`) this is the familiar
/// `sinα ∝ ω − λ+`; off resonance it stays an exact eigenvector of `G`.
pub fn supermode_decomposition<T: Real>(
    params: &SystemParams<T>,
) -> Result<SupermodeDecomposition<T>> {
    if params.g == T::zero() {
        return Err(Error::DecoupledSystem);
    }
    let matrix = coupling_matrix(params);
    let (lambda_plus, lambda_minus) = eigenfrequencies(&matrix);
    let offset = params.omega_b - lambda_plus;
    let norm = params.g.hypot(offset);
    let sin_alpha = offset / norm;
    let cos_alpha = -params.g / norm;
    Ok(SupermodeDecomposition {
        lambda_plus,
        lambda_minus,
        sin_alpha,
        cos_alpha,
        drive_plus: params.drive_amplitude * sin_alpha,
        drive_minus: params.drive_amplitude * cos_alpha,
    })
}

/// Drive frequency that resonantly addresses one renormalized normal mode.
pub fn resonant_drive_frequency<T: Real>(params: &SystemParams<T>, branch: Branch) -> T {
    let (plus, minus) = eigenfrequencies(&coupling_matrix(params));
    match branch {
        Branch::Plus => plus,
        Branch::Minus => minus,
    }
}
