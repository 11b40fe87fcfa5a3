//! Small dense complex linear algebra: PSD testing, Hermitian matrix powers,
//! unitary completion and signature matrices.
//!
//! All matrices here are tiny (Gram and Pick sections of a few dozen points at
//! most), so everything goes through a full Hermitian eigendecomposition.

use nalgebra::SymmetricEigen;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::{CMatrix, CVector, C64};

/// Relative Frobenius tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Relative eigenvalue floor below which a matrix is not positive definite.
pub const PD_FLOOR: f64 = 1e-12;
/// Default relative tolerance of [`psd_check`].
pub const DEFAULT_PSD_TOL: f64 = 1e-8;

/// A square complex matrix equal to its conjugate transpose within
/// [`HERMITIAN_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    entries: CMatrix,
}

impl HermitianMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        let deviation = hermitian_deviation(&entries);
        if !(deviation <= HERMITIAN_TOL) {
            return Err(Error::NonHermitianInput { deviation });
        }
        Ok(Self { entries })
    }

    /// Wraps a matrix that is Hermitian by construction after forcing exact
    /// symmetry.
    pub(crate) fn symmetrized(entries: CMatrix) -> Self {
        let entries = (&entries + entries.adjoint()) * C64::new(0.5, 0.0);
        Self { entries }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: CMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_inner(self) -> CMatrix {
        self.entries
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> CMatrix {
        (&self.entries + self.entries.adjoint()) * C64::new(0.5, 0.0)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim() == 0 {
            return Vec::new();
        }
        let mut values: Vec<f64> = self
            .hermitian_part()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    pub fn shifted(&self, epsilon: f64) -> Self {
        let n = self.dim();
        Self {
            entries: &self.entries + CMatrix::identity(n, n) * C64::new(epsilon, 0.0),
        }
    }
}

/// `‖M - M*‖_F / ‖M‖_F`, zero for the zero matrix.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let scale = m.norm();
    if scale == 0.0 {
        return 0.0;
    }
    (m - m.adjoint()).norm() / scale
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdReport {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub tolerance_used: f64,
}

impl PsdReport {
    fn from_extremes(min_eigenvalue: f64, max_eigenvalue: f64, tol: f64) -> Self {
        Self {
            is_psd: min_eigenvalue >= -tol * max_eigenvalue.max(1.0),
            min_eigenvalue,
            max_eigenvalue,
            tolerance_used: tol,
        }
    }
}

/// Sampled positivity: `min_eig >= -tol * max(1, max_eig)` on the Hermitian part.
pub fn psd_check(m: &HermitianMatrix, tol: f64) -> PsdReport {
    let values = m.eigenvalues();
    match (values.first(), values.last()) {
        (Some(&lo), Some(&hi)) => PsdReport::from_extremes(lo, hi, tol),
        _ => PsdReport::from_extremes(0.0, 0.0, tol),
    }
}

/// Exponents supported by [`hermitian_power`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixPower {
    Half,
    NegHalf,
    NegOne,
}

impl MatrixPower {
    fn apply(self, x: f64) -> f64 {
        match self {
            MatrixPower::Half => x.sqrt(),
            MatrixPower::NegHalf => 1.0 / x.sqrt(),
            MatrixPower::NegOne => 1.0 / x,
        }
    }
}

/// `M^{1/2}`, `M^{-1/2}` or `M^{-1}` of a positive definite matrix.
pub fn hermitian_power(m: &HermitianMatrix, power: MatrixPower) -> Result<HermitianMatrix> {
    if m.dim() == 0 {
        return Ok(HermitianMatrix::identity(0));
    }
    let eigen = SymmetricEigen::new(m.hermitian_part());
    let (lo, hi) = eigen
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if !(lo > PD_FLOOR * hi.max(0.0)) || !(hi > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: lo });
    }
    let v = &eigen.eigenvectors;
    let mut scaled = v.clone();
    for (j, &lambda) in eigen.eigenvalues.iter().enumerate() {
        let mut column = scaled.column_mut(j);
        column *= C64::new(power.apply(lambda), 0.0);
    }
    Ok(HermitianMatrix::symmetrized(scaled * v.adjoint()))
}

/// A `p x p` unitary whose last column is `ξ / ‖ξ‖`.
///
/// Built from one Householder reflection sending `e_p` to a phase multiple of
/// `ξ / ‖ξ‖`, with the phase moved into the last column. The first `p - 1`
/// columns then span `ξ^⊥`.
pub fn unitary_completion(xi: &CVector) -> Result<CMatrix> {
    let p = xi.len();
    let norm = xi.norm();
    if p == 0 || !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let u = xi.unscale(norm);
    let last = u[p - 1];
    let phase = if last.norm() > 0.0 {
        last.unscale(last.norm())
    } else {
        C64::new(1.0, 0.0)
    };
    // v = phase * e_p + u, so the reflection maps phase * e_p to -u.
    let mut v = u.clone();
    v[p - 1] += phase;
    let vv = v.norm_squared();
    let mut h = CMatrix::identity(p, p) - (&v * v.adjoint()) * C64::new(2.0 / vv, 0.0);
    let mut last_col = h.column_mut(p - 1);
    last_col *= -phase;
    Ok(h)
}

/// The signature matrix `J_{p,q} = diag(I_p, -I_q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignatureMatrix {
    p: usize,
    q: usize,
}

impl SignatureMatrix {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    pub fn trace(&self) -> i64 {
        self.p as i64 - self.q as i64
    }

    pub fn diagonal(&self) -> Vec<f64> {
        std::iter::repeat_n(1.0, self.p)
            .chain(std::iter::repeat_n(-1.0, self.q))
            .collect()
    }

    pub fn matrix(&self) -> CMatrix {
        let n = self.dim();
        let diag = self.diagonal();
        CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// `J x` without forming `J`.
    pub fn apply(&self, x: &CVector) -> CVector {
        let mut out = x.clone();
        for i in self.p..out.len() {
            out[i] = -out[i];
        }
        out
    }
}

pub fn signature(p: usize, q: usize) -> Result<SignatureMatrix> {
    if p + q == 0 {
        return Err(Error::EmptySignature);
    }
    Ok(SignatureMatrix { p, q })
}
