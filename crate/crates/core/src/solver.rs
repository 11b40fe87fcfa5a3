//! Multi-point left-tangential interpolation by repeated Schur steps.
//!
//! Conditions are peeled in input order. The first condition fixes a factor
//! `Θ`, the remaining ones are transported through it to conditions on the
//! Schur parameter, and the loop continues on the parameter, whose row count
//! grows by `N - 1` per step. The innermost parameter is zero, which gives the
//! central solution.
//!
//! The transported Pick matrix is the Schur complement of the original one, so
//! every stepwise margin is positive exactly when the Pick matrix is positive
//! definite.

use serde::Serialize;

use crate::ball::BallPoint;
use crate::contractivity::PoincareDatum;
use crate::error::{Error, Result};
use crate::expr::MultiplierExpr;
use crate::hermitian::{psd_check, PsdReport};
use crate::json::complex_pairs;
use crate::kernel::{pick_matrix, schur_class_test, EmbeddingSpec, KernelSpec, TangentialCondition};
use crate::sampling;
use crate::theta::{lft_step, theta_tangential, ThetaFactor, STRICT_FLOOR_REL};
use crate::{CMatrix, CVector};

/// A transported condition with `‖ξ'‖² + ‖η'‖²` below this fraction (squared)
/// of its original size is satisfied by every parameter and is dropped.
pub const DEGENERATE_REL: f64 = 1e-9;

/// Attempts per requested sample when drawing domain points whose image stays
/// under the radius cap.
const DOMAIN_SAMPLE_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationProblem {
    n: usize,
    p: usize,
    q: usize,
    conditions: Vec<TangentialCondition>,
    embedding: Option<EmbeddingSpec>,
    domain_points: Vec<CVector>,
    warnings: Vec<String>,
}

fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

impl InterpolationProblem {
    /// Conditions `ξ_i* S(ν_i) = η_i*` for a `p x q` multiplier on `B_N`.
    pub fn new(n: usize, p: usize, q: usize, conditions: Vec<TangentialCondition>) -> Result<Self> {
        if n == 0 || p == 0 || q == 0 {
            return Err(Error::EmptyInput);
        }
        for c in &conditions {
            check_dim("condition nu", n, c.nu.dim())?;
            check_dim("condition xi", p, c.xi.len())?;
            check_dim("condition eta", q, c.eta.len())?;
        }
        let domain_points = conditions.iter().map(|c| c.nu.coords().clone()).collect();
        let mut problem = Self {
            n,
            p,
            q,
            conditions,
            embedding: None,
            domain_points,
            warnings: Vec::new(),
        };
        problem.collect_warnings();
        Ok(problem)
    }

    /// Conditions `ξ_i* S(w_i) = η_i*` at domain points `w_i` for `S = G ∘ β`.
    /// Each `w_i` is mapped once to `ν_i = β(w_i)`.
    pub fn with_embedding(
        embedding: EmbeddingSpec,
        p: usize,
        q: usize,
        conditions: Vec<(CVector, CVector, CVector)>,
    ) -> Result<Self> {
        let d = embedding.domain_dim();
        let mut mapped = Vec::with_capacity(conditions.len());
        let mut domain_points = Vec::with_capacity(conditions.len());
        for (w, xi, eta) in conditions {
            check_dim("condition domain point", d, w.len())?;
            let nu = embedding.map_into_ball(&w)?;
            mapped.push(TangentialCondition::new(nu, xi, eta));
            domain_points.push(w);
        }
        let mut problem = Self::new(embedding.target_dim(), p, q, mapped)?;
        problem.embedding = Some(embedding);
        problem.domain_points = domain_points;
        Ok(problem)
    }

    fn collect_warnings(&mut self) {
        self.warnings.clear();
        for i in 0..self.conditions.len() {
            for j in i + 1..self.conditions.len() {
                if self.conditions[i].nu == self.conditions[j].nu {
                    self.warnings
                        .push(format!("conditions {i} and {j} share the point nu"));
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// The ball-side conditions (after mapping through the embedding, if any).
    pub fn conditions(&self) -> &[TangentialCondition] {
        &self.conditions
    }

    pub fn embedding(&self) -> Option<&EmbeddingSpec> {
        self.embedding.as_ref()
    }

    /// Points at which the solution is evaluated to test each condition.
    pub fn domain_points(&self) -> &[CVector] {
        &self.domain_points
    }

    /// Dimension of the points the solution accepts.
    pub fn domain_dim(&self) -> usize {
        self.embedding.as_ref().map_or(self.n, |e| e.domain_dim())
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// The kernel the solution is a Schur multiplier for.
    pub fn kernel(&self) -> KernelSpec {
        match &self.embedding {
            Some(e) => KernelSpec::pullback_unit(e.clone()),
            None => KernelSpec::DruryArveson { n: self.n },
        }
    }

    /// The same problem with conditions reordered by `order`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        check_dim("permutation length", self.conditions.len(), order.len())?;
        let mut seen = vec![false; order.len()];
        for &i in order {
            if i >= order.len() || seen[i] {
                return Err(Error::ShapeMismatch(format!("{order:?} is not a permutation")));
            }
            seen[i] = true;
        }
        let mut out = self.clone();
        out.conditions = order.iter().map(|&i| self.conditions[i].clone()).collect();
        out.domain_points = order.iter().map(|&i| self.domain_points[i].clone()).collect();
        out.collect_warnings();
        Ok(out)
    }
}

/// `ξ' = A(ν₂)*ξ - C(ν₂)*η`, `η' = D*η - B*ξ`: a parameter `σ` satisfies the
/// transported condition exactly when the step output satisfies `cond`.
pub fn transport_condition(theta: &ThetaFactor, cond: &TangentialCondition) -> Result<TangentialCondition> {
    check_dim("transported nu", theta.ball_dim(), cond.nu.dim())?;
    check_dim("transported xi", theta.p(), cond.xi.len())?;
    check_dim("transported eta", theta.q(), cond.eta.len())?;
    let a = theta.a_block(&cond.nu)?;
    let c = theta.c_block(&cond.nu)?;
    let xi = a.adjoint() * &cond.xi - c.adjoint() * &cond.eta;
    let eta = theta.d_block().adjoint() * &cond.eta - theta.b_block().adjoint() * &cond.xi;
    Ok(TangentialCondition::new(cond.nu.clone(), xi, eta))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionRecord {
    /// Position of the condition in the input list.
    pub index: usize,
    pub nu: Vec<[f64; 2]>,
    pub xi: Vec<[f64; 2]>,
    pub eta: Vec<[f64; 2]>,
    pub margin: f64,
}

impl ConditionRecord {
    fn new(index: usize, c: &TangentialCondition) -> Self {
        Self {
            index,
            nu: complex_pairs(c.nu.coords()),
            xi: complex_pairs(&c.xi),
            eta: complex_pairs(&c.eta),
            margin: c.margin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    /// The datum `Θ` is built from.
    pub datum: ConditionRecord,
    /// `ξ*ξ - η*η` of that datum.
    pub margin: f64,
    /// Shape of the Schur parameter after the step.
    pub param_shape: (usize, usize),
    pub transported: Vec<ConditionRecord>,
    pub dropped: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct StepLog {
    pub steps: Vec<StepRecord>,
    pub warnings: Vec<String>,
}

impl StepLog {
    pub fn margins(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.margin).collect()
    }
}

struct Peeled {
    thetas: Vec<ThetaFactor>,
    log: StepLog,
    /// `(step, margin)` of the first nonstrict datum.
    failure: Option<(usize, f64)>,
}

fn peel(problem: &InterpolationProblem) -> Peeled {
    let mut log = StepLog {
        steps: Vec::new(),
        warnings: problem.warnings.clone(),
    };
    let mut thetas = Vec::new();
    let scales: Vec<f64> = problem
        .conditions
        .iter()
        .map(|c| c.xi.norm_squared() + c.eta.norm_squared())
        .collect();
    let mut pending: Vec<(usize, TangentialCondition)> =
        problem.conditions.iter().cloned().enumerate().collect();

    let mut step = 0;
    while !pending.is_empty() {
        let (index, head) = pending.remove(0);
        let margin = head.margin();
        if !(margin > STRICT_FLOOR_REL * head.xi.norm_squared()) {
            return Peeled {
                thetas,
                log,
                failure: Some((step, margin)),
            };
        }
        let theta = match theta_tangential(&head.nu, &head.xi, &head.eta) {
            Ok(t) => t,
            Err(_) => {
                return Peeled {
                    thetas,
                    log,
                    failure: Some((step, margin)),
                }
            }
        };
        let mut transported = Vec::with_capacity(pending.len());
        let mut dropped = Vec::new();
        for (i, cond) in pending {
            let Ok(next) = transport_condition(&theta, &cond) else {
                return Peeled {
                    thetas,
                    log,
                    failure: Some((step, margin)),
                };
            };
            let size = next.xi.norm_squared() + next.eta.norm_squared();
            if size <= DEGENERATE_REL * DEGENERATE_REL * scales[i] {
                dropped.push(i);
            } else {
                transported.push((i, next));
            }
        }
        log.steps.push(StepRecord {
            step,
            datum: ConditionRecord::new(index, &head),
            margin,
            param_shape: theta.param_shape(),
            transported: transported.iter().map(|(i, c)| ConditionRecord::new(*i, c)).collect(),
            dropped,
        });
        thetas.push(theta);
        pending = transported;
        step += 1;
    }
    Peeled {
        thetas,
        log,
        failure: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvabilityReport {
    pub pick: PsdReport,
    pub pick_eigenvalues: Vec<f64>,
    pub margins: Vec<f64>,
    pub dropped: Vec<usize>,
    pub solvable: bool,
    /// Step at which a datum failed strictness.
    pub failed_at: Option<usize>,
    pub failed_margin: Option<f64>,
    pub warnings: Vec<String>,
}

/// Pick positivity and the stepwise margins of the peeling loop. Infeasible data
/// is reported, not raised.
pub fn solvability_check(problem: &InterpolationProblem) -> SolvabilityReport {
    let pick = pick_matrix(&problem.conditions).expect("problem dimensions are validated");
    let peeled = peel(problem);
    SolvabilityReport {
        pick: psd_check(&pick, crate::hermitian::DEFAULT_PSD_TOL),
        pick_eigenvalues: pick.eigenvalues(),
        margins: peeled.log.margins(),
        dropped: peeled.log.steps.iter().flat_map(|s| s.dropped.iter().copied()).collect(),
        solvable: peeled.failure.is_none(),
        failed_at: peeled.failure.map(|f| f.0),
        failed_margin: peeled.failure.map(|f| f.1),
        warnings: peeled.log.warnings,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralSolution {
    pub solution: MultiplierExpr,
    pub log: StepLog,
}

/// The central solution: every free parameter set to zero.
pub fn solve_central(problem: &InterpolationProblem) -> Result<CentralSolution> {
    let peeled = peel(problem);
    if let Some((step, margin)) = peeled.failure {
        return Err(Error::NotSolvable { step, margin });
    }
    let mut thetas = peeled.thetas.into_iter().rev();
    let ball_solution = match thetas.next() {
        None => MultiplierExpr::zeros(problem.p, problem.q),
        Some(last) => {
            // a zero parameter leaves the constant B D^{-1}
            let mut expr = MultiplierExpr::constant(last.b_block() * last.d_inverse());
            for theta in thetas {
                expr = lft_step(&theta, expr)?;
            }
            expr
        }
    };
    let solution = match &problem.embedding {
        Some(e) => ball_solution.compose_embedding(e.clone())?,
        None => ball_solution,
    };
    Ok(CentralSolution {
        solution,
        log: peeled.log,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    pub radius_cap: f64,
    pub tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            samples: 50,
            seed: 0,
            radius_cap: 0.95,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResidual {
    pub index: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoincareSummary {
    pub index: usize,
    /// `false` when the condition is not satisfied closely enough for the
    /// inequality to apply; no margins are reported then.
    pub hypothesis_holds: bool,
    pub min_margin: Option<f64>,
    pub worst_point: Option<Vec<[f64; 2]>>,
    pub matrix: Option<PsdReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub residuals: Vec<ConditionResidual>,
    pub max_residual: f64,
    pub schur: PsdReport,
    pub poincare: Vec<PoincareSummary>,
    pub samples: usize,
    pub tol: f64,
}

impl VerificationReport {
    pub fn passes(&self) -> bool {
        self.worst_offender().is_none()
    }

    /// A description of the worst failing check, if any fails.
    pub fn worst_offender(&self) -> Option<String> {
        if let Some(r) = self
            .residuals
            .iter()
            .filter(|r| !(r.residual < self.tol))
            .max_by(|a, b| a.residual.total_cmp(&b.residual))
        {
            return Some(format!("condition {} residual {:e}", r.index, r.residual));
        }
        if !self.schur.is_psd {
            return Some(format!(
                "sampled Schur-class test, min eigenvalue {:e}",
                self.schur.min_eigenvalue
            ));
        }
        for p in &self.poincare {
            if let Some(m) = p.min_margin.filter(|m| !(*m >= -self.tol)) {
                return Some(format!("Poincare inequality for condition {}, margin {:e}", p.index, m));
            }
            if let Some(m) = p.matrix.as_ref().filter(|m| !m.is_psd) {
                return Some(format!(
                    "Poincare matrix for condition {}, min eigenvalue {:e}",
                    p.index, m.min_eigenvalue
                ));
            }
        }
        None
    }
}

/// Seeded evaluation points in the solution's domain. For embedded problems the
/// points are drawn from a ball in `C^d` and kept when `‖β(z)‖ <= radius_cap`.
pub fn sample_domain_points(problem: &InterpolationProblem, count: usize, seed: u64, radius_cap: f64) -> Vec<CVector> {
    let mut rng = sampling::rng(seed);
    match &problem.embedding {
        None => sampling::ball_points(&mut rng, problem.n, count, radius_cap)
            .into_iter()
            .map(|p| p.coords().clone())
            .collect(),
        Some(e) => {
            let mut out = Vec::with_capacity(count);
            for _ in 0..count * DOMAIN_SAMPLE_ATTEMPTS {
                if out.len() == count {
                    break;
                }
                let z = sampling::ball_point(&mut rng, e.domain_dim(), radius_cap);
                if let Ok(image) = e.eval(z.coords()) {
                    if image.norm() <= radius_cap {
                        out.push(z.coords().clone());
                    }
                }
            }
            out
        }
    }
}

/// Condition residuals, the sampled Schur-class test and the Poincaré checks of
/// each condition for a candidate solution.
pub fn verify_solution(
    problem: &InterpolationProblem,
    s: &MultiplierExpr,
    options: &VerifyOptions,
) -> Result<VerificationReport> {
    if s.shape() != (problem.p, problem.q) {
        return Err(Error::ShapeMismatch(format!(
            "solution has shape {:?}, problem requires ({}, {})",
            s.shape(),
            problem.p,
            problem.q
        )));
    }
    if options.samples == 0 {
        return Err(Error::EmptyInput);
    }
    let residuals = problem
        .conditions
        .iter()
        .zip(&problem.domain_points)
        .enumerate()
        .map(|(index, (c, w))| {
            Ok(ConditionResidual {
                index,
                residual: c.residual(&s.eval(w)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_residual = residuals.iter().map(|r| r.residual).fold(0.0, f64::max);

    let points = sample_domain_points(problem, options.samples, options.seed, options.radius_cap);
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let schur = schur_class_test(s, &problem.kernel(), &points, options.tol)?;

    let values = points.iter().map(|z| s.eval(z)).collect::<Result<Vec<CMatrix>>>()?;
    let lambdas = match &problem.embedding {
        Some(e) => points.iter().map(|z| e.map_into_ball(z)).collect::<Result<Vec<_>>>()?,
        None => points.iter().map(|z| BallPoint::new(z.clone())).collect::<Result<Vec<_>>>()?,
    };
    let matrix_count = lambdas.len().min(20);
    let mut poincare = Vec::with_capacity(problem.conditions.len());
    for (index, (c, w)) in problem.conditions.iter().zip(&problem.domain_points).enumerate() {
        let datum = match PoincareDatum::new(c.nu.clone(), c.xi.clone(), c.eta.clone()) {
            Ok(d) => d,
            Err(_) => {
                poincare.push(PoincareSummary {
                    index,
                    hypothesis_holds: false,
                    min_margin: None,
                    worst_point: None,
                    matrix: None,
                });
                continue;
            }
        };
        if datum.require_hypothesis(&s.eval(w)?, options.tol).is_err() {
            poincare.push(PoincareSummary {
                index,
                hypothesis_holds: false,
                min_margin: None,
                worst_point: None,
                matrix: None,
            });
            continue;
        }
        let mut worst: Option<(f64, usize)> = None;
        for (k, (l, v)) in lambdas.iter().zip(&values).enumerate() {
            let m = datum.check_at(l, v)?.margin;
            if worst.is_none_or(|(best, _)| m < best) {
                worst = Some((m, k));
            }
        }
        let matrix = datum.matrix_check(&lambdas[..matrix_count], &values[..matrix_count], options.tol)?;
        poincare.push(PoincareSummary {
            index,
            hypothesis_holds: true,
            min_margin: worst.map(|w| w.0),
            worst_point: worst.map(|w| complex_pairs(&points[w.1])),
            matrix: Some(matrix),
        });
    }

    Ok(VerificationReport {
        residuals,
        max_residual,
        schur,
        poincare,
        samples: points.len(),
        tol: options.tol,
    })
}
