//! The J-inner factor `Θ_ν` of a tangential datum and the single Schur step.
//!
//! For `ν ∈ B_N`, `ξ ∈ C^p`, `η ∈ C^q` with `η*η < ξ*ξ`, write `c = (ξ; η)`,
//! `κ = c* J_{p,q} c = ξ*ξ - η*η`, `D = (I_q + ηη*/κ)^{1/2}` and
//! `B = ξη*/κ · D^{-1}`. With `U` a unitary whose last column is `ξ/‖ξ‖` and
//! `U₁₃` its first `p - 1` columns,
//!
//! ```text
//!         ⎡ ξ b_ν(λ)/√κ   U₁₃   B ⎤      A(λ) = [ξ b_ν(λ)/√κ, U₁₃]   (p × (N+p-1))
//! Θ(λ) =  ⎣ η b_ν(λ)/√κ    0    D ⎦      C(λ) = [η b_ν(λ)/√κ, 0]     (q × (N+p-1))
//! ```
//!
//! and `α = [[U₁₃, B], [0, D]]` diagonalizes `J_{p,q} - cc*/κ = α J_{p-1,q} α*`.
//! The Schur step maps a `(N+p-1) x q` parameter `σ` to
//! `s = (A σ + B)(C σ + D)^{-1}`, which satisfies `ξ* s(ν) = η*`.

use crate::ball::{pairing, BallPoint, BlaschkeRow};
use crate::error::{Error, Result};
use crate::expr::{MultiplierExpr, LFT_CONDITION_LIMIT};
use crate::hermitian::{
    hermitian_power, psd_check, signature, unitary_completion, HermitianMatrix, MatrixPower,
    PsdReport, SignatureMatrix,
};
use crate::sampling;
use crate::{CMatrix, CVector, C64};

/// Relative strictness floor: data with `ξ*ξ - η*η <= STRICT_FLOOR_REL · ξ*ξ`
/// is rejected.
pub const STRICT_FLOOR_REL: f64 = 1e-10;

/// Slack allowed by the parameter contractivity probe of [`lft_step`].
pub const PARAM_PROBE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaKind {
    /// `diag(b_ν, 1)`, the scalar vanishing case.
    Vanishing,
    Tangential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaFactor {
    kind: ThetaKind,
    nu: BallPoint,
    xi: CVector,
    eta: CVector,
    blaschke: BlaschkeRow,
    cjc: f64,
    sqrt_cjc: f64,
    unitary: CMatrix,
    d: CMatrix,
    d_inv: CMatrix,
    b: CMatrix,
}

/// `Θ_ν = diag(b_ν, 1)` for the condition `s(ν) = 0`.
pub fn theta_vanishing(nu: &BallPoint) -> Result<ThetaFactor> {
    let one = CMatrix::identity(1, 1);
    Ok(ThetaFactor {
        kind: ThetaKind::Vanishing,
        nu: nu.clone(),
        xi: CVector::from_element(1, C64::new(1.0, 0.0)),
        eta: CVector::zeros(1),
        blaschke: BlaschkeRow::new(nu.clone())?,
        cjc: 1.0,
        sqrt_cjc: 1.0,
        unitary: one.clone(),
        d: one.clone(),
        d_inv: one,
        b: CMatrix::zeros(1, 1),
    })
}

pub fn theta_tangential(nu: &BallPoint, xi: &CVector, eta: &CVector) -> Result<ThetaFactor> {
    let (p, q) = (xi.len(), eta.len());
    if p == 0 || q == 0 {
        return Err(Error::DimensionMismatch {
            context: "theta datum (p and q must be positive)",
            expected: 1,
            found: 0,
        });
    }
    let xi2 = xi.norm_squared();
    let cjc = xi2 - eta.norm_squared();
    if !(cjc > STRICT_FLOOR_REL * xi2) {
        return Err(Error::NotStrictlySolvable { margin: cjc });
    }
    let unitary = unitary_completion(xi)?;
    let defect = HermitianMatrix::symmetrized(
        CMatrix::identity(q, q) + (eta * eta.adjoint()) * C64::new(1.0 / cjc, 0.0),
    );
    let d = hermitian_power(&defect, MatrixPower::Half)?.into_inner();
    let d_inv = hermitian_power(&defect, MatrixPower::NegHalf)?.into_inner();
    let b = (xi * eta.adjoint()) * C64::new(1.0 / cjc, 0.0) * &d_inv;
    Ok(ThetaFactor {
        kind: ThetaKind::Tangential,
        nu: nu.clone(),
        xi: xi.clone(),
        eta: eta.clone(),
        blaschke: BlaschkeRow::new(nu.clone())?,
        cjc,
        sqrt_cjc: cjc.sqrt(),
        unitary,
        d,
        d_inv,
        b,
    })
}

impl ThetaFactor {
    pub fn kind(&self) -> ThetaKind {
        self.kind
    }

    pub fn nu(&self) -> &BallPoint {
        &self.nu
    }

    pub fn xi(&self) -> &CVector {
        &self.xi
    }

    pub fn eta(&self) -> &CVector {
        &self.eta
    }

    pub fn ball_dim(&self) -> usize {
        self.nu.dim()
    }

    pub fn p(&self) -> usize {
        self.xi.len()
    }

    pub fn q(&self) -> usize {
        self.eta.len()
    }

    /// `c* J_{p,q} c = ξ*ξ - η*η`.
    pub fn cjc(&self) -> f64 {
        self.cjc
    }

    /// `c = (ξ; η)`.
    pub fn c(&self) -> CVector {
        let mut c = CVector::zeros(self.p() + self.q());
        c.rows_mut(0, self.p()).copy_from(&self.xi);
        c.rows_mut(self.p(), self.q()).copy_from(&self.eta);
        c
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    /// `[U₁; U₃]`, the first `p - 1` columns of the completion.
    pub fn complement(&self) -> CMatrix {
        self.unitary.columns(0, self.p() - 1).into_owned()
    }

    pub fn b_block(&self) -> &CMatrix {
        &self.b
    }

    pub fn d_block(&self) -> &CMatrix {
        &self.d
    }

    pub fn d_inverse(&self) -> &CMatrix {
        &self.d_inv
    }

    pub fn blaschke(&self) -> &BlaschkeRow {
        &self.blaschke
    }

    /// Shape `(N + p - 1, q)` of the Schur parameter.
    pub fn param_shape(&self) -> (usize, usize) {
        (self.ball_dim() + self.p() - 1, self.q())
    }

    pub fn left_signature(&self) -> SignatureMatrix {
        signature(self.p(), self.q()).expect("p, q >= 1")
    }

    /// `J̃ = J_{N+p-1, q}`.
    pub fn right_signature(&self) -> SignatureMatrix {
        signature(self.ball_dim() + self.p() - 1, self.q()).expect("q >= 1")
    }

    /// `α = [[U₁₃, B], [0, D]]`, of size `(p+q) x (p-1+q)`.
    pub fn alpha(&self) -> CMatrix {
        let (p, q) = (self.p(), self.q());
        let mut alpha = CMatrix::zeros(p + q, p - 1 + q);
        alpha.view_mut((0, 0), (p, p - 1)).copy_from(&self.complement());
        alpha.view_mut((0, p - 1), (p, q)).copy_from(&self.b);
        alpha.view_mut((p, p - 1), (q, q)).copy_from(&self.d);
        alpha
    }

    fn a_from_row(&self, brow: &CMatrix) -> CMatrix {
        let (n, p) = (self.ball_dim(), self.p());
        let mut a = CMatrix::zeros(p, n + p - 1);
        a.view_mut((0, 0), (p, n))
            .copy_from(&((&self.xi * brow) * C64::new(1.0 / self.sqrt_cjc, 0.0)));
        a.view_mut((0, n), (p, p - 1)).copy_from(&self.complement());
        a
    }

    fn c_from_row(&self, brow: &CMatrix) -> CMatrix {
        let (n, p, q) = (self.ball_dim(), self.p(), self.q());
        let mut c = CMatrix::zeros(q, n + p - 1);
        c.view_mut((0, 0), (q, n))
            .copy_from(&((&self.eta * brow) * C64::new(1.0 / self.sqrt_cjc, 0.0)));
        c
    }

    pub fn a_block(&self, lambda: &BallPoint) -> Result<CMatrix> {
        Ok(self.a_from_row(&self.blaschke.eval(lambda)?))
    }

    pub fn c_block(&self, lambda: &BallPoint) -> Result<CMatrix> {
        Ok(self.c_from_row(&self.blaschke.eval(lambda)?))
    }

    /// The full `(p+q) x (N+p-1+q)` value `Θ(λ)`.
    pub fn eval(&self, lambda: &BallPoint) -> Result<CMatrix> {
        let brow = self.blaschke.eval(lambda)?;
        let (n, p, q) = (self.ball_dim(), self.p(), self.q());
        let mut theta = CMatrix::zeros(p + q, n + p - 1 + q);
        let c = self.c();
        theta
            .view_mut((0, 0), (p + q, n))
            .copy_from(&((&c * &brow) * C64::new(1.0 / self.sqrt_cjc, 0.0)));
        theta.view_mut((0, n), (p + q, p - 1 + q)).copy_from(&self.alpha());
        Ok(theta)
    }

    /// `(A σ + B)(C σ + D)^{-1}` at `λ` for a parameter value `σ`.
    pub fn apply(&self, lambda: &BallPoint, sigma: &CMatrix) -> Result<CMatrix> {
        if sigma.shape() != self.param_shape() {
            return Err(Error::ShapeMismatch(format!(
                "parameter value {:?}, expected {:?}",
                sigma.shape(),
                self.param_shape()
            )));
        }
        let brow = self.blaschke.eval(lambda)?;
        let num = self.a_from_row(&brow) * sigma + &self.b;
        let den = self.c_from_row(&brow) * sigma + &self.d;
        let sv = den.singular_values();
        let (lo, hi) = sv
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if !(condition <= LFT_CONDITION_LIMIT) {
            return Err(Error::SingularDenominator { condition });
        }
        // s = num · den^{-1}, via den* s* = num*
        let sol = den
            .adjoint()
            .lu()
            .solve(&num.adjoint())
            .ok_or(Error::SingularDenominator { condition })?;
        Ok(sol.adjoint())
    }

    /// `‖J_{p,q} - cc*/κ - α J_{p-1,q} α*‖_F`.
    pub fn diagonalization_residual(&self) -> f64 {
        let c = self.c();
        let j = self.left_signature().matrix();
        let alpha = self.alpha();
        let mid = signature(self.p() - 1, self.q()).expect("q >= 1").matrix();
        let lhs = j - (&c * c.adjoint()) * C64::new(1.0 / self.cjc, 0.0);
        (lhs - &alpha * mid * alpha.adjoint()).norm()
    }

    /// `‖c* J Θ(ν)‖`.
    pub fn null_residual(&self) -> f64 {
        let jc = self.left_signature().apply(&self.c());
        match self.eval(&self.nu) {
            Ok(theta) => (jc.adjoint() * theta).norm(),
            Err(_) => f64::INFINITY,
        }
    }

    /// `‖ξ* [U₁; U₃]‖`.
    pub fn completion_residual(&self) -> f64 {
        (self.xi.adjoint() * self.complement()).norm()
    }

    /// Residuals of `ξ*A(λ) - η*C(λ) = [√κ b_ν(λ), 0]` and `ξ*B - η*D = 0`.
    pub fn block_identity_residuals(&self, lambda: &BallPoint) -> Result<(f64, f64)> {
        let brow = self.blaschke.eval(lambda)?;
        let (n, p) = (self.ball_dim(), self.p());
        let lhs = self.xi.adjoint() * self.a_from_row(&brow) - self.eta.adjoint() * self.c_from_row(&brow);
        let mut rhs = CMatrix::zeros(1, n + p - 1);
        rhs.view_mut((0, 0), (1, n))
            .copy_from(&(&brow * C64::new(self.sqrt_cjc, 0.0)));
        let first = (lhs - rhs).norm();
        let second = (self.xi.adjoint() * &self.b - self.eta.adjoint() * &self.d).norm();
        Ok((first, second))
    }
}

/// Frobenius distance between `f_ν(λ) f_ν(μ)* / ‖f_ν‖²` and
/// `(J - Θ(λ) J̃ Θ(μ)*) / (1 - <λ, μ>)`, where `f_ν(λ) = c / (1 - <λ, ν>)` and
/// `‖f_ν‖² = κ / (1 - <ν, ν>)`.
pub fn theta_kernel_residual(theta: &ThetaFactor, lambda: &BallPoint, mu: &BallPoint) -> Result<f64> {
    let one = C64::new(1.0, 0.0);
    let nu = theta.nu().coords();
    let c = theta.c();
    let f_lambda = &c / (one - pairing(lambda.coords(), nu));
    let f_mu = &c / (one - pairing(mu.coords(), nu));
    let norm2 = theta.cjc() / (1.0 - nu.norm_squared());
    let lhs = (&f_lambda * f_mu.adjoint()) / C64::new(norm2, 0.0);

    let j = theta.left_signature().matrix();
    let jt = theta.right_signature().matrix();
    let tl = theta.eval(lambda)?;
    let tm = theta.eval(mu)?;
    let rhs = (j - tl * jt * tm.adjoint()) / (one - pairing(lambda.coords(), mu.coords()));
    Ok((lhs - rhs).norm())
}

fn probe_points(n: usize, nu: &BallPoint) -> Vec<CVector> {
    let mut rng = sampling::rng(0x005e_ed0f_60a1);
    let mut points = vec![CVector::zeros(n), nu.coords().clone()];
    points.extend(
        sampling::ball_points(&mut rng, n, 8, 0.9)
            .into_iter()
            .map(|p| p.coords().clone()),
    );
    points
}

/// One Schur step: `s = (A σ + B)(C σ + D)^{-1}` for a parameter `σ` of shape
/// `(N + p - 1, q)`. The parameter must be contractive on a fixed set of probe
/// points.
pub fn lft_step(theta: &ThetaFactor, param: MultiplierExpr) -> Result<MultiplierExpr> {
    if param.shape() != theta.param_shape() {
        return Err(Error::ShapeMismatch(format!(
            "lft parameter has shape {:?}, theta requires {:?}",
            param.shape(),
            theta.param_shape()
        )));
    }
    for z in probe_points(theta.ball_dim(), theta.nu()) {
        let norm = sampling::operator_norm(&param.eval(&z)?);
        if norm > 1.0 + PARAM_PROBE_TOL {
            return Err(Error::ParameterNotContractive { norm });
        }
    }
    MultiplierExpr::lft(theta.clone(), param)
}

/// `s = b_ν s_ν` for an `N x 1` multiplier `s_ν`; vanishes at `ν`.
pub fn synthesize_vanishing(nu: &BallPoint, s_nu: MultiplierExpr) -> Result<MultiplierExpr> {
    if s_nu.shape() != (nu.dim(), 1) {
        return Err(Error::ShapeMismatch(format!(
            "vanishing parameter has shape {:?}, expected ({}, 1)",
            s_nu.shape(),
            nu.dim()
        )));
    }
    MultiplierExpr::product(MultiplierExpr::blaschke_row(nu.clone())?, s_nu)
}

/// Positivity of `(b_ν(λ) b_ν(μ)* - s(λ) conj(s(μ))) / (1 - <λ, μ>)` on the
/// sample points; this holds exactly when `s` factors as `b_ν s_ν`.
pub fn vanishing_kernel_test(
    s: &MultiplierExpr,
    nu: &BallPoint,
    points: &[CVector],
    tol: f64,
) -> Result<PsdReport> {
    if s.shape() != (1, 1) {
        return Err(Error::ShapeMismatch(format!(
            "vanishing kernel needs a scalar function, got {:?}",
            s.shape()
        )));
    }
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let b = BlaschkeRow::new(nu.clone())?;
    let one = C64::new(1.0, 0.0);
    let mut rows = Vec::with_capacity(points.len());
    let mut values = Vec::with_capacity(points.len());
    let mut coords = Vec::with_capacity(points.len());
    for z in points {
        let lambda = BallPoint::new(z.clone())?;
        rows.push(b.eval(&lambda)?);
        values.push(s.eval(z)?[(0, 0)]);
        coords.push(lambda);
    }
    let m = points.len();
    let mut k = CMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let num = (&rows[i] * rows[j].adjoint())[(0, 0)] - values[i] * values[j].conj();
            let value = num / (one - pairing(coords[i].coords(), coords[j].coords()));
            k[(i, j)] = value;
            k[(j, i)] = value.conj();
        }
    }
    Ok(psd_check(&HermitianMatrix::new(k)?, tol))
}
