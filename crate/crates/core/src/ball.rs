//! Points of the open unit ball `B_N ⊂ C^N` and the row-valued Blaschke factor.

use crate::error::{Error, Result};
use crate::hermitian::{hermitian_power, HermitianMatrix, MatrixPower};
use crate::{CMatrix, CVector, C64};

/// Points with `‖λ‖ >= 1 - BALL_MARGIN` are rejected.
pub const BALL_MARGIN: f64 = 1e-6;

/// `<x, y> = Σ x_i conj(y_i)`, no dimension check.
pub(crate) fn pairing(x: &CVector, y: &CVector) -> C64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
}

/// `v` as a dynamically sized `1 x n` matrix.
pub(crate) fn as_row(v: &CVector) -> CMatrix {
    CMatrix::from_iterator(1, v.len(), v.iter().copied())
}

/// `v*` as a `1 x n` matrix.
pub(crate) fn adjoint_row(v: &CVector) -> CMatrix {
    CMatrix::from_iterator(1, v.len(), v.iter().map(|z| z.conj()))
}

/// A point of the open unit ball, kept at least [`BALL_MARGIN`] away from the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    coords: CVector,
}

impl BallPoint {
    pub fn new(coords: CVector) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyInput);
        }
        let norm = coords.norm();
        if !(norm <= 1.0 - BALL_MARGIN) {
            return Err(Error::OutsideBall { norm });
        }
        Ok(Self { coords })
    }

    pub fn from_slice(coords: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(coords))
    }

    pub fn origin(n: usize) -> Self {
        Self {
            coords: CVector::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &CVector {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }

    /// The point as a `1 x N` row.
    pub fn row(&self) -> CMatrix {
        as_row(&self.coords)
    }
}

impl AsRef<CVector> for BallPoint {
    fn as_ref(&self) -> &CVector {
        &self.coords
    }
}

pub fn ball_inner(lambda: &BallPoint, mu: &BallPoint) -> Result<C64> {
    check_dims("ball_inner", lambda.dim(), mu.dim())?;
    Ok(pairing(&lambda.coords, &mu.coords))
}

fn check_dims(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

/// The Blaschke factor vanishing at `α`:
///
/// `b_α(λ) = (1 - <α,α>)^{1/2} / (1 - <λ,α>) · (λ - α) (I_N - α*α)^{-1/2}`,
///
/// a contractive `1 x N` row multiplier with `b_α(α) = 0`. For `N = 1` it is the
/// disc automorphism `(z - a) / (1 - z conj(a))`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeRow {
    alpha: BallPoint,
    defect: f64,
    sqrt_defect: f64,
    correction: CMatrix,
}

impl BlaschkeRow {
    pub fn new(alpha: BallPoint) -> Result<Self> {
        let n = alpha.dim();
        let defect = 1.0 - alpha.coords.norm_squared();
        let row = alpha.row();
        let gram = CMatrix::identity(n, n) - row.adjoint() * &row;
        let correction =
            hermitian_power(&HermitianMatrix::symmetrized(gram), MatrixPower::NegHalf)?
                .into_inner();
        Ok(Self {
            alpha,
            defect,
            sqrt_defect: defect.sqrt(),
            correction,
        })
    }

    pub fn alpha(&self) -> &BallPoint {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.alpha.dim()
    }

    /// `1 - <α, α>`.
    pub fn defect(&self) -> f64 {
        self.defect
    }

    /// `(I_N - α*α)^{-1/2}`.
    pub fn correction(&self) -> &CMatrix {
        &self.correction
    }

    pub fn eval(&self, lambda: &BallPoint) -> Result<CMatrix> {
        check_dims("blaschke_eval", self.dim(), lambda.dim())?;
        Ok(self.eval_unchecked(&lambda.coords))
    }

    pub(crate) fn eval_unchecked(&self, lambda: &CVector) -> CMatrix {
        let scale = C64::new(self.sqrt_defect, 0.0)
            / (C64::new(1.0, 0.0) - pairing(lambda, &self.alpha.coords));
        (as_row(&(lambda - &self.alpha.coords)) * &self.correction) * scale
    }
}

pub fn blaschke_eval(b: &BlaschkeRow, lambda: &BallPoint) -> Result<CMatrix> {
    b.eval(lambda)
}

/// `|(1 - b_α(λ) b_α(μ)*) / (1 - <λ,μ>) - (1 - <α,α>) / ((1 - <λ,α>)(1 - <α,μ>))|`.
pub fn blaschke_identity_residual(alpha: &BallPoint, lambda: &BallPoint, mu: &BallPoint) -> Result<f64> {
    check_dims("blaschke_identity_residual", alpha.dim(), lambda.dim())?;
    check_dims("blaschke_identity_residual", alpha.dim(), mu.dim())?;
    let one = C64::new(1.0, 0.0);
    let b = BlaschkeRow::new(alpha.clone())?;
    let bl = b.eval(lambda)?;
    let bm = b.eval(mu)?;
    let lhs = (one - (&bl * bm.adjoint())[(0, 0)]) / (one - pairing(&lambda.coords, &mu.coords));
    let rhs = C64::new(b.defect, 0.0)
        / ((one - pairing(&lambda.coords, &alpha.coords))
            * (one - pairing(&alpha.coords, &mu.coords)));
    Ok((lhs - rhs).norm())
}
