//! Poincaré contractivity of Schur multipliers that interpolate one datum.
//!
//! If `s` is a Schur multiplier on `B_N` with `ξ* s(ν) = η*` and
//! `κ = ξ*ξ - η*η > 0`, then for every `λ ∈ B_N`
//!
//! ```text
//! ‖(ξ* s(λ) - η*) (I_q + ηη*/κ)^{1/2}‖ <= |ξ*ξ - ξ* s(λ) η| / √κ · ‖b_ν(λ)‖
//! ```
//!
//! and the kernel built from both sides over finitely many points is positive.

use serde::Serialize;

use crate::ball::{adjoint_row, pairing, BallPoint, BlaschkeRow};
use crate::error::{Error, Result};
use crate::expr::MultiplierExpr;
use crate::hermitian::{hermitian_power, psd_check, HermitianMatrix, MatrixPower, PsdReport};
use crate::json::complex_pairs;
use crate::theta::STRICT_FLOOR_REL;
use crate::{CMatrix, CVector, C64};

/// Tolerance on `‖ξ* s(ν) - η*‖` before a check is evaluated.
pub const HYPOTHESIS_TOL: f64 = 1e-8;

/// Threshold below which `|1 - s(z) conj(s(a))|` counts as zero.
pub const DISC_DENOMINATOR_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractivityReport {
    pub point: Vec<[f64; 2]>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl ContractivityReport {
    fn new(point: &CVector, lhs: f64, rhs: f64) -> Self {
        Self {
            point: complex_pairs(point),
            lhs,
            rhs,
            margin: rhs - lhs,
        }
    }
}

/// The datum `(ν, ξ, η)` with the quantities both sides of the inequality share.
#[derive(Debug, Clone)]
pub struct PoincareDatum {
    blaschke: BlaschkeRow,
    xi: CVector,
    eta: CVector,
    sqrt_cjc: f64,
    defect_root: CMatrix,
}

impl PoincareDatum {
    pub fn new(nu: BallPoint, xi: CVector, eta: CVector) -> Result<Self> {
        if xi.is_empty() || eta.is_empty() {
            return Err(Error::EmptyInput);
        }
        let xi2 = xi.norm_squared();
        let cjc = xi2 - eta.norm_squared();
        if !(cjc > STRICT_FLOOR_REL * xi2) {
            return Err(Error::NotStrictlySolvable { margin: cjc });
        }
        let q = eta.len();
        let defect = CMatrix::identity(q, q) + (&eta * eta.adjoint()) * C64::new(1.0 / cjc, 0.0);
        let defect_root =
            hermitian_power(&HermitianMatrix::symmetrized(defect), MatrixPower::Half)?.into_inner();
        Ok(Self {
            blaschke: BlaschkeRow::new(nu)?,
            xi,
            eta,
            sqrt_cjc: cjc.sqrt(),
            defect_root,
        })
    }

    pub fn nu(&self) -> &BallPoint {
        self.blaschke.alpha()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.xi.len(), self.eta.len())
    }

    fn check_shape(&self, value: &CMatrix) -> Result<()> {
        if value.shape() != self.shape() {
            return Err(Error::ShapeMismatch(format!(
                "value {:?} does not match datum {:?}",
                value.shape(),
                self.shape()
            )));
        }
        Ok(())
    }

    /// Fails unless `‖ξ* s(ν) - η*‖ <= tol`.
    pub fn require_hypothesis(&self, value_at_nu: &CMatrix, tol: f64) -> Result<()> {
        self.check_shape(value_at_nu)?;
        let residual = (self.xi.adjoint() * value_at_nu - self.eta.adjoint()).norm();
        if !(residual <= tol) {
            return Err(Error::HypothesisViolated { residual });
        }
        Ok(())
    }

    /// The scalar `(ξ*ξ - ξ* s η)/√κ`, the row `b_ν(λ)` and the row
    /// `(ξ* s - η*)(I + ηη*/κ)^{1/2}` at one point.
    fn sides(&self, lambda: &BallPoint, value: &CMatrix) -> Result<(C64, CMatrix, CMatrix)> {
        self.check_shape(value)?;
        let sv = value * &self.eta;
        let weight = (C64::new(self.xi.norm_squared(), 0.0) - self.xi.dotc(&sv)) / self.sqrt_cjc;
        let brow = self.blaschke.eval(lambda)?;
        let beta = (adjoint_row(&self.xi) * value - adjoint_row(&self.eta)) * &self.defect_root;
        Ok((weight, brow, beta))
    }

    /// Compares both sides at `λ` given the value `s(λ)`.
    pub fn check_at(&self, lambda: &BallPoint, value: &CMatrix) -> Result<ContractivityReport> {
        let (weight, brow, beta) = self.sides(lambda, value)?;
        Ok(ContractivityReport::new(lambda.coords(), beta.norm(), weight.norm() * brow.norm()))
    }

    /// `[(α(λ_n)α(λ_m)* - β(λ_n)β(λ_m)*) / (1 - <λ_n, λ_m>)]` from the values `s(λ_n)`.
    pub fn matrix_check(&self, lambdas: &[BallPoint], values: &[CMatrix], tol: f64) -> Result<PsdReport> {
        if lambdas.len() != values.len() {
            return Err(Error::DimensionMismatch {
                context: "poincare matrix values",
                expected: lambdas.len(),
                found: values.len(),
            });
        }
        if lambdas.is_empty() {
            return Err(Error::EmptyInput);
        }
        let sides = lambdas
            .iter()
            .zip(values)
            .map(|(l, v)| self.sides(l, v))
            .collect::<Result<Vec<_>>>()?;
        let m = lambdas.len();
        let one = C64::new(1.0, 0.0);
        let mut k = CMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let (wi, bi, ri) = &sides[i];
                let (wj, bj, rj) = &sides[j];
                let alpha = wi * wj.conj() * (bi * bj.adjoint())[(0, 0)];
                let beta = (ri * rj.adjoint())[(0, 0)];
                let value = (alpha - beta) / (one - pairing(lambdas[i].coords(), lambdas[j].coords()));
                k[(i, j)] = value;
                k[(j, i)] = value.conj();
            }
        }
        Ok(psd_check(&HermitianMatrix::new(k)?, tol))
    }
}

/// Pointwise contractivity of `s` at `λ` for the datum `(ν, ξ, η)`.
pub fn poincare_check(
    s: &MultiplierExpr,
    nu: &BallPoint,
    xi: &CVector,
    eta: &CVector,
    lambda: &BallPoint,
) -> Result<ContractivityReport> {
    let datum = PoincareDatum::new(nu.clone(), xi.clone(), eta.clone())?;
    datum.require_hypothesis(&s.eval(nu.coords())?, HYPOTHESIS_TOL)?;
    datum.check_at(lambda, &s.eval(lambda.coords())?)
}

/// The matrix form of [`poincare_check`] over `points`.
pub fn poincare_matrix_check(
    s: &MultiplierExpr,
    nu: &BallPoint,
    xi: &CVector,
    eta: &CVector,
    points: &[CVector],
    tol: f64,
) -> Result<PsdReport> {
    let datum = PoincareDatum::new(nu.clone(), xi.clone(), eta.clone())?;
    datum.require_hypothesis(&s.eval(nu.coords())?, HYPOTHESIS_TOL)?;
    let lambdas = points
        .iter()
        .map(|z| BallPoint::new(z.clone()))
        .collect::<Result<Vec<_>>>()?;
    let values = points.iter().map(|z| s.eval(z)).collect::<Result<Vec<_>>>()?;
    datum.matrix_check(&lambdas, &values, tol)
}

/// `|(s(z) - s(a)) / (1 - s(z) conj(s(a)))| <= |(z - a) / (1 - z conj(a))|` for a
/// scalar function on the disc.
pub fn classical_disc_check(s: &MultiplierExpr, a: C64, z: C64) -> Result<ContractivityReport> {
    if s.shape() != (1, 1) {
        return Err(Error::ShapeMismatch(format!(
            "disc check needs a scalar function, got {:?}",
            s.shape()
        )));
    }
    let one = C64::new(1.0, 0.0);
    let a_pt = BallPoint::from_slice(&[a])?;
    let z_pt = BallPoint::from_slice(&[z])?;
    let sa = s.eval(a_pt.coords())?[(0, 0)];
    let sz = s.eval(z_pt.coords())?[(0, 0)];
    let den = one - sz * sa.conj();
    if den.norm() < DISC_DENOMINATOR_FLOOR {
        return Err(Error::DenominatorVanishes);
    }
    let lhs = ((sz - sa) / den).norm();
    let rhs = ((z - a) / (one - z * a.conj())).norm();
    Ok(ContractivityReport::new(z_pt.coords(), lhs, rhs))
}
