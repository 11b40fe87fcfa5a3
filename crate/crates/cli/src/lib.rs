//! Subcommands of the `ballschur` binary.
//!
//! Each command returns an [`Outcome`]: the process exit code and the JSON
//! report to emit. Exit codes follow one contract for every command: 0 on
//! success, 1 on malformed input, 2 on infeasible data and 3 when a
//! verification fails.

use std::fs;
use std::path::{Path, PathBuf};

use ballschur::json::{
    expr_from_document, matrix_to_value, points_from_value, problem_from_value, solution_document,
    vector_to_value, SCHEMA_VERSION,
};
use ballschur::sampling::{self, SampleRng};
use ballschur::theta::theta_kernel_residual;
use ballschur::{
    blaschke_identity_residual, classical_disc_check, lft_step, poincare_check, solvability_check,
    solve_central, theta_tangential, verify_solution, BallPoint, CMatrix, CVector, Error,
    MultiplierExpr, ThetaFactor, VerifyOptions, C64,
};
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: usize,
    pub radius_cap: f64,
    pub tol: f64,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 50,
            radius_cap: 0.95,
            tol: 1e-8,
            output_path: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.radius_cap > 0.0 && self.radius_cap < 1.0) {
            return Err(format!("radius cap must lie in (0, 1), got {}", self.radius_cap));
        }
        if self.samples == 0 {
            return Err("samples must be at least 1".to_string());
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(format!("tolerance must be positive, got {}", self.tol));
        }
        Ok(())
    }

    fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            samples: self.samples,
            seed: self.seed,
            radius_cap: self.radius_cap,
            tol: self.tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

impl Outcome {
    fn new(code: i32, report: Value) -> Self {
        Self { code, report }
    }

    fn error(code: i32, kind: &str, message: impl Into<String>) -> Self {
        Self::new(
            code,
            json!({"schema_version": SCHEMA_VERSION, "error": {"kind": kind, "message": message.into()}}),
        )
    }

    fn from_library_error(err: &Error) -> Self {
        let code = match err {
            Error::NotSolvable { .. } | Error::NotStrictlySolvable { .. } => EXIT_INFEASIBLE,
            Error::SingularDenominator { .. }
            | Error::ParameterNotContractive { .. }
            | Error::HypothesisViolated { .. }
            | Error::DenominatorVanishes
            | Error::DomainEscape { .. } => EXIT_VERIFY,
            _ => EXIT_INPUT,
        };
        Self::error(code, error_kind(err), err.to_string())
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::MalformedDocument { .. } => "malformed_document",
        Error::NotSolvable { .. } | Error::NotStrictlySolvable { .. } => "not_solvable",
        Error::SingularDenominator { .. } => "singular_denominator",
        Error::DomainEscape { .. } => "domain_escape",
        Error::ShapeMismatch(_) | Error::DimensionMismatch { .. } => "shape_mismatch",
        _ => "numerical",
    }
}

fn read_json(path: &Path) -> Result<Value, Outcome> {
    let text = fs::read_to_string(path)
        .map_err(|e| Outcome::error(EXIT_INPUT, "io", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Outcome::error(EXIT_INPUT, "parse", format!("{}: {e}", path.display())))
}

fn with_schema(mut value: Value) -> Value {
    if let Value::Object(map) = &mut value {
        map.insert("schema_version".to_string(), json!(SCHEMA_VERSION));
    }
    value
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

pub fn cmd_check(problem_path: &Path) -> Outcome {
    let doc = match read_json(problem_path) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let problem = match problem_from_value(&doc) {
        Ok(p) => p,
        Err(e) => return Outcome::from_library_error(&e),
    };
    let report = solvability_check(&problem);
    let code = if report.solvable { EXIT_OK } else { EXIT_INFEASIBLE };
    Outcome::new(code, with_schema(to_value(&report)))
}

pub fn cmd_solve(problem_path: &Path, config: &RunConfig) -> Outcome {
    if let Err(msg) = config.validate() {
        return Outcome::error(EXIT_INPUT, "config", msg);
    }
    let doc = match read_json(problem_path) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let problem = match problem_from_value(&doc) {
        Ok(p) => p,
        Err(e) => return Outcome::from_library_error(&e),
    };
    let check = solvability_check(&problem);
    if !check.solvable {
        let mut report = with_schema(to_value(&check));
        report["error"] = json!({"kind": "not_solvable", "message": "stepwise strictness fails"});
        return Outcome::new(EXIT_INFEASIBLE, report);
    }
    match solve_central(&problem) {
        Ok(solution) => Outcome::new(EXIT_OK, solution_document(&solution)),
        Err(e) => Outcome::from_library_error(&e),
    }
}

pub fn cmd_eval(solution_path: &Path, points_path: &Path) -> Outcome {
    let (solution, points) = match (read_json(solution_path), read_json(points_path)) {
        (Ok(s), Ok(p)) => (s, p),
        (Err(o), _) | (_, Err(o)) => return o,
    };
    let expr = match expr_from_document(&solution) {
        Ok(e) => e,
        Err(e) => return Outcome::from_library_error(&e),
    };
    let points = match points_from_value(&points) {
        Ok(p) => p,
        Err(e) => return Outcome::from_library_error(&e),
    };
    let values: Vec<Value> = points
        .iter()
        .map(|z| match expr.eval(z) {
            Ok(m) => json!({"point": vector_to_value(z), "value": matrix_to_value(&m)}),
            Err(e) => json!({
                "point": vector_to_value(z),
                "error": {"kind": error_kind(&e), "message": e.to_string()},
            }),
        })
        .collect();
    Outcome::new(
        EXIT_OK,
        json!({"schema_version": SCHEMA_VERSION, "shape": expr.shape(), "values": values}),
    )
}

pub fn cmd_verify(solution_path: &Path, problem_path: &Path, config: &RunConfig) -> Outcome {
    if let Err(msg) = config.validate() {
        return Outcome::error(EXIT_INPUT, "config", msg);
    }
    let (solution, problem) = match (read_json(solution_path), read_json(problem_path)) {
        (Ok(s), Ok(p)) => (s, p),
        (Err(o), _) | (_, Err(o)) => return o,
    };
    let expr = match expr_from_document(&solution) {
        Ok(e) => e,
        Err(e) => return Outcome::from_library_error(&e),
    };
    let problem = match problem_from_value(&problem) {
        Ok(p) => p,
        Err(e) => return Outcome::from_library_error(&e),
    };
    match verify_solution(&problem, &expr, &config.verify_options()) {
        Ok(report) => {
            let mut value = with_schema(to_value(&report));
            value["passes"] = json!(report.passes());
            match report.worst_offender() {
                None => Outcome::new(EXIT_OK, value),
                Some(worst) => {
                    value["worst_offender"] = json!(worst);
                    Outcome::new(EXIT_VERIFY, value)
                }
            }
        }
        Err(e) => Outcome::from_library_error(&e),
    }
}

/// Residual threshold of the self-test for a given radius cap. Identities lose
/// accuracy like `(1 - r²)^{-2}` near the sphere.
pub fn selftest_threshold(radius_cap: f64) -> f64 {
    if radius_cap <= 0.95 {
        1e-10
    } else {
        1e-7
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResult {
    pub name: &'static str,
    pub trials: usize,
    pub max_residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

struct Suite {
    rng: SampleRng,
    cap: f64,
    trials: usize,
}

impl Suite {
    fn point(&mut self, n: usize) -> BallPoint {
        sampling::ball_point(&mut self.rng, n, self.cap)
    }

    /// A random factor with `η*η <= 0.81 ξ*ξ`.
    fn theta(&mut self, n: usize, p: usize, q: usize) -> ThetaFactor {
        use ballschur::sampling::Rng;
        let nu = self.point(n);
        let xi = sampling::nonzero_vector(&mut self.rng, p);
        let mut eta = sampling::complex_vector(&mut self.rng, q);
        let ratio = 0.9 * self.rng.random::<f64>();
        if eta.norm() > 0.0 {
            eta *= C64::new(ratio * xi.norm() / eta.norm(), 0.0);
        }
        theta_tangential(&nu, &xi, &eta).expect("strict random datum")
    }

    fn max_over<F>(&mut self, mut f: F) -> Result<f64, Error>
    where
        F: FnMut(&mut Self) -> Result<f64, Error>,
    {
        let mut worst = 0.0f64;
        for _ in 0..self.trials {
            let r = f(self)?;
            worst = if r.is_nan() { f64::INFINITY } else { worst.max(r) };
        }
        Ok(worst)
    }
}

fn dims(rng: &mut SampleRng, max_n: usize, max_p: usize, max_q: usize) -> (usize, usize, usize) {
    use ballschur::sampling::Rng;
    (
        rng.random_range(1..=max_n),
        rng.random_range(1..=max_p),
        rng.random_range(1..=max_q),
    )
}

type Identity = (&'static str, fn(&mut Suite) -> Result<f64, Error>);

fn identities() -> Vec<Identity> {
    vec![
        ("blaschke_kernel_identity", |s| {
            let n = [1, 2, 3, 5][s.trials % 4];
            let (a, l, m) = (s.point(n), s.point(n), s.point(n));
            blaschke_identity_residual(&a, &l, &m)
        }),
        ("alpha_diagonalization", |s| {
            let (n, p, q) = dims(&mut s.rng, 3, 4, 3);
            Ok(s.theta(n, p, q).diagonalization_residual())
        }),
        ("completion_orthogonality", |s| {
            let (n, p, q) = dims(&mut s.rng, 3, 4, 3);
            Ok(s.theta(n, p, q).completion_residual())
        }),
        ("theta_kernel_identity", |s| {
            let (n, p, q) = dims(&mut s.rng, 3, 3, 2);
            let theta = s.theta(n, p, q);
            let (l, m) = (s.point(n), s.point(n));
            theta_kernel_residual(&theta, &l, &m)
        }),
        ("theta_null_identity", |s| {
            let (n, p, q) = dims(&mut s.rng, 3, 3, 2);
            Ok(s.theta(n, p, q).null_residual())
        }),
        ("block_identities", |s| {
            let (n, p, q) = dims(&mut s.rng, 3, 3, 2);
            let theta = s.theta(n, p, q);
            let l = s.point(n);
            let (a, b) = theta.block_identity_residuals(&l)?;
            Ok(a.max(b))
        }),
        ("scalar_step_reduction", |s| {
            let a = s.point(1);
            let sa = sampling::disc_point(&mut s.rng) * 0.9;
            let sigma = sampling::disc_point(&mut s.rng) * 0.99;
            let one = vec1(C64::new(1.0, 0.0));
            let theta = theta_tangential(&a, &one, &vec1(sa.conj()))?;
            let step = lft_step(&theta, MultiplierExpr::constant(CMatrix::from_element(1, 1, sigma)))?;
            let z = s.point(1);
            let b = (z.coords()[0] - a.coords()[0]) / (C64::new(1.0, 0.0) - z.coords()[0] * a.coords()[0].conj());
            let expected = (b * sigma + sa) / (C64::new(1.0, 0.0) + b * sigma * sa.conj());
            Ok((step.eval(z.coords())?[(0, 0)] - expected).norm())
        }),
        ("scalar_poincare_reduction", |s| {
            // the general inequality, rescaled by (1 - |s(a)|²)^{1/2}, is the disc one
            let beta = MultiplierExpr::blaschke_row(s.point(1))?;
            let f = MultiplierExpr::product(beta.clone(), beta)?;
            let (a, z) = (s.point(1), s.point(1));
            let sa = f.eval(a.coords())?[(0, 0)];
            let sz = f.eval(z.coords())?[(0, 0)];
            let general = poincare_check(&f, &a, &vec1(C64::new(1.0, 0.0)), &vec1(sa.conj()), &z)?;
            let disc = classical_disc_check(&f, a.coords()[0], z.coords()[0])?;
            let scale = (1.0 - sa.norm_sqr()).sqrt();
            let den = (C64::new(1.0, 0.0) - sz * sa.conj()).norm();
            Ok((general.lhs * scale / den - disc.lhs).abs() + (general.rhs * scale / den - disc.rhs).abs())
        }),
    ]
}

fn vec1(z: C64) -> CVector {
    CVector::from_element(1, z)
}

/// Runs every identity `samples` times at the configured seed and radius cap.
pub fn cmd_selftest(config: &RunConfig) -> Outcome {
    if let Err(msg) = config.validate() {
        return Outcome::error(EXIT_INPUT, "config", msg);
    }
    let threshold = selftest_threshold(config.radius_cap);
    let mut results = Vec::new();
    for (k, (name, identity)) in identities().into_iter().enumerate() {
        let mut suite = Suite {
            rng: sampling::rng(config.seed.wrapping_add(k as u64)),
            cap: config.radius_cap,
            trials: config.samples,
        };
        let max_residual = match suite.max_over(identity) {
            Ok(r) => r,
            Err(e) => return Outcome::error(EXIT_VERIFY, name, e.to_string()),
        };
        results.push(IdentityResult {
            name,
            trials: config.samples,
            max_residual,
            threshold,
            pass: max_residual < threshold,
        });
    }
    let all_pass = results.iter().all(|r| r.pass);
    Outcome::new(
        if all_pass { EXIT_OK } else { EXIT_VERIFY },
        json!({
            "schema_version": SCHEMA_VERSION,
            "seed": config.seed,
            "samples": config.samples,
            "radius_cap": config.radius_cap,
            "pass": all_pass,
            "identities": to_value(&results),
        }),
    )
}

/// Pretty JSON with a trailing newline.
pub fn render(report: &Value) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
    text.push('\n');
    text
}
