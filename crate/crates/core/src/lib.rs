//! Schur-class multipliers of complete Nevanlinna-Pick kernels on the unit ball.
//!
//! The crate covers the constructive side of the Schur algorithm for the
//! Drury-Arveson space and its pullbacks `K(z, w) = δ(z) conj(δ(w)) / (1 - <β(z), β(w)>)`:
//!
//! * [`ball`]: points of the ball `B_N` and the row-valued Blaschke factor `b_α`.
//! * [`kernel`]: kernel evaluation and Pick matrices, plus the sampled
//!   Schur-class test.
//! * [`expr`]: a closed, serializable expression language for matrix-valued
//!   functions on the ball.
//! * [`theta`]: the J-inner factor `Θ_ν` of a tangential datum and the single
//!   linear-fractional Schur step.
//! * [`solver`]: the multi-point left-tangential interpolation solver.
//! * [`contractivity`]: pointwise and matrix Poincaré contractivity checks.
//!
//! Every positivity statement is certified on finite point samples only.

// Negated comparisons such as `!(x <= tol)` are used on purpose so that NaN
// values fall on the rejecting side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod ball;
pub mod contractivity;
pub mod error;
pub mod expr;
pub mod hermitian;
pub mod json;
pub mod kernel;
pub mod sampling;
pub mod solver;
pub mod theta;

pub use nalgebra::Complex;

/// Complex scalar used throughout.
pub type C64 = Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

pub use ball::{ball_inner, blaschke_eval, blaschke_identity_residual, BallPoint, BlaschkeRow};
pub use contractivity::{
    classical_disc_check, poincare_check, poincare_matrix_check, ContractivityReport,
    PoincareDatum,
};
pub use error::{Error, Result};
pub use expr::{MultiplierExpr, Node};
pub use hermitian::{
    hermitian_power, psd_check, signature, unitary_completion, HermitianMatrix, MatrixPower,
    PsdReport, SignatureMatrix,
};
pub use kernel::{
    gram_matrix, kernel_eval, pick_matrix, schur_class_test, EmbeddingSpec, KernelSpec, Monomial,
    Polynomial, TangentialCondition,
};
pub use solver::{
    solvability_check, solve_central, transport_condition, verify_solution, CentralSolution,
    InterpolationProblem, SolvabilityReport, StepLog, StepRecord, VerificationReport,
    VerifyOptions,
};
pub use theta::{
    lft_step, synthesize_vanishing, theta_kernel_residual, theta_tangential, theta_vanishing,
    vanishing_kernel_test, ThetaFactor, ThetaKind,
};
