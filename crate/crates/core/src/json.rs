//! Canonical JSON documents for multiplier expressions and the data they act on.
//!
//! Complex numbers are `[re, im]` pairs. Matrices are arrays of rows, and a
//! vector is a plain array of pairs. Expression nodes are objects tagged by
//! `"node"`:
//!
//! | tag                 | fields                                  |
//! |---------------------|-----------------------------------------|
//! | `const`             | `matrix`                                |
//! | `blaschke_row`      | `alpha`                                 |
//! | `hcat`, `vcat`      | `parts`                                 |
//! | `product`, `sum`    | `left`, `right`                         |
//! | `scale`             | `factor`, `expr`                        |
//! | `lft`               | `theta: {kind, nu, xi, eta}`, `param`   |
//! | `compose_embedding` | `embedding`, `inner`                    |
//!
//! A solution document wraps the root node as
//! `{"schema_version": 1, "expr": ..., "step_log": ...}`. Parse errors carry a
//! JSON-pointer style location.

use serde_json::{json, Map, Value};

use crate::ball::BallPoint;
use crate::error::{Error, Result};
use crate::expr::{MultiplierExpr, Node};
use crate::kernel::{EmbeddingSpec, KernelSpec, Monomial, Polynomial, TangentialCondition};
use crate::solver::{CentralSolution, InterpolationProblem};
use crate::theta::{theta_tangential, theta_vanishing, ThetaKind};
use crate::{CMatrix, CVector, C64};

pub const SCHEMA_VERSION: u64 = 1;

fn malformed(location: &str, message: impl Into<String>) -> Error {
    Error::MalformedDocument {
        location: if location.is_empty() { "/".to_string() } else { location.to_string() },
        message: message.into(),
    }
}

fn child(path: &str, key: impl std::fmt::Display) -> String {
    format!("{path}/{key}")
}

pub fn complex_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn complex_pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| complex_pair(*z)).collect()
}

pub fn complex_to_value(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn vector_to_value(v: &CVector) -> Value {
    Value::Array(v.iter().map(|z| complex_to_value(*z)).collect())
}

pub fn matrix_to_value(m: &CMatrix) -> Value {
    Value::Array(
        m.row_iter()
            .map(|row| Value::Array(row.iter().map(|z| complex_to_value(*z)).collect()))
            .collect(),
    )
}

fn number(value: &Value, path: &str) -> Result<f64> {
    value
        .as_f64()
        .ok_or_else(|| malformed(path, "expected a number"))
}

/// `[re, im]`, or a bare real number.
pub fn complex_from_value(value: &Value, path: &str) -> Result<C64> {
    match value {
        Value::Number(_) => Ok(C64::new(number(value, path)?, 0.0)),
        Value::Array(pair) if pair.len() == 2 => Ok(C64::new(
            number(&pair[0], &child(path, 0))?,
            number(&pair[1], &child(path, 1))?,
        )),
        _ => Err(malformed(path, "expected a complex number [re, im]")),
    }
}

fn array<'a>(value: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    value
        .as_array()
        .ok_or_else(|| malformed(path, "expected an array"))
}

fn object<'a>(value: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| malformed(path, "expected an object"))
}

fn field<'a>(map: &'a Map<String, Value>, key: &str, path: &str) -> Result<(&'a Value, String)> {
    map.get(key)
        .map(|v| (v, child(path, key)))
        .ok_or_else(|| malformed(path, format!("missing field \"{key}\"")))
}

fn usize_field(map: &Map<String, Value>, key: &str, path: &str) -> Result<usize> {
    let (v, at) = field(map, key, path)?;
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| malformed(&at, "expected a nonnegative integer"))
}

pub fn vector_from_value(value: &Value, path: &str) -> Result<CVector> {
    let items = array(value, path)?;
    let entries = items
        .iter()
        .enumerate()
        .map(|(i, z)| complex_from_value(z, &child(path, i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CVector::from_vec(entries))
}

pub fn matrix_from_value(value: &Value, path: &str) -> Result<CMatrix> {
    let rows = array(value, path)?;
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(i, r)| vector_from_value(r, &child(path, i)))
        .collect::<Result<Vec<_>>>()?;
    let cols = parsed.first().map_or(0, |r| r.len());
    if let Some(i) = parsed.iter().position(|r| r.len() != cols) {
        return Err(malformed(&child(path, i), format!("row has {} entries, expected {cols}", parsed[i].len())));
    }
    if parsed.is_empty() || cols == 0 {
        return Err(malformed(path, "matrix must be nonempty"));
    }
    Ok(CMatrix::from_fn(parsed.len(), cols, |i, j| parsed[i][j]))
}

fn located(err: Error, path: &str) -> Error {
    match err {
        Error::MalformedDocument { .. } => err,
        other => malformed(path, other.to_string()),
    }
}

fn point_from_value(value: &Value, path: &str) -> Result<BallPoint> {
    BallPoint::new(vector_from_value(value, path)?).map_err(|e| located(e, path))
}

pub fn polynomial_to_value(p: &Polynomial) -> Value {
    Value::Array(
        p.terms()
            .iter()
            .map(|t| json!({"coeff": complex_to_value(t.coeff), "exponents": t.exponents}))
            .collect(),
    )
}

/// A term list, or `{"terms": [...]}`.
pub fn polynomial_from_value(value: &Value, domain_dim: usize, path: &str) -> Result<Polynomial> {
    let (terms_value, terms_path) = match value {
        Value::Object(map) => field(map, "terms", path)?,
        _ => (value, path.to_string()),
    };
    let terms = array(terms_value, &terms_path)?
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let at = child(&terms_path, i);
            let map = object(t, &at)?;
            let (coeff, coeff_at) = field(map, "coeff", &at)?;
            let (exps, exps_at) = field(map, "exponents", &at)?;
            let exponents = array(exps, &exps_at)?
                .iter()
                .enumerate()
                .map(|(k, e)| {
                    e.as_u64()
                        .and_then(|e| u32::try_from(e).ok())
                        .ok_or_else(|| malformed(&child(&exps_at, k), "expected a small nonnegative integer"))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Monomial {
                coeff: complex_from_value(coeff, &coeff_at)?,
                exponents,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Polynomial::new(domain_dim, terms).map_err(|e| located(e, path))
}

pub fn embedding_to_value(e: &EmbeddingSpec) -> Value {
    json!({
        "domain_dim": e.domain_dim(),
        "target_dim": e.target_dim(),
        "components": e.components().iter().map(polynomial_to_value).collect::<Vec<_>>(),
    })
}

pub fn embedding_from_value(value: &Value, path: &str) -> Result<EmbeddingSpec> {
    let map = object(value, path)?;
    let d = usize_field(map, "domain_dim", path)?;
    let (comps, comps_at) = field(map, "components", path)?;
    let components = array(comps, &comps_at)?
        .iter()
        .enumerate()
        .map(|(i, c)| polynomial_from_value(c, d, &child(&comps_at, i)))
        .collect::<Result<Vec<_>>>()?;
    if map.contains_key("target_dim") {
        let target = usize_field(map, "target_dim", path)?;
        if target != components.len() {
            return Err(malformed(
                &child(path, "target_dim"),
                format!("{target} does not match {} components", components.len()),
            ));
        }
    }
    EmbeddingSpec::new(d, components).map_err(|e| located(e, path))
}

pub fn kernel_to_value(k: &KernelSpec) -> Value {
    match k {
        KernelSpec::DruryArveson { n } => json!({"variant": "drury_arveson", "N": n}),
        KernelSpec::Pullback { embedding, delta } => json!({
            "variant": "pullback",
            "embedding": embedding_to_value(embedding),
            "delta": polynomial_to_value(delta),
        }),
    }
}

pub fn kernel_from_value(value: &Value, path: &str) -> Result<KernelSpec> {
    let map = object(value, path)?;
    let (variant, variant_at) = field(map, "variant", path)?;
    match variant.as_str() {
        Some("drury_arveson") => Ok(KernelSpec::DruryArveson {
            n: usize_field(map, "N", path)?,
        }),
        Some("pullback") => {
            let (e, e_at) = field(map, "embedding", path)?;
            let embedding = embedding_from_value(e, &e_at)?;
            match map.get("delta") {
                None => Ok(KernelSpec::pullback_unit(embedding)),
                Some(delta) => {
                    let delta = polynomial_from_value(delta, embedding.domain_dim(), &child(path, "delta"))?;
                    Ok(KernelSpec::Pullback { embedding, delta })
                }
            }
        }
        _ => Err(malformed(&variant_at, "unknown kernel variant")),
    }
}

pub fn expr_to_value(e: &MultiplierExpr) -> Value {
    match e.node() {
        Node::Const(m) => json!({"node": "const", "matrix": matrix_to_value(m)}),
        Node::BlaschkeRow(b) => json!({"node": "blaschke_row", "alpha": vector_to_value(b.alpha().coords())}),
        Node::HCat(parts) => json!({"node": "hcat", "parts": parts.iter().map(expr_to_value).collect::<Vec<_>>()}),
        Node::VCat(parts) => json!({"node": "vcat", "parts": parts.iter().map(expr_to_value).collect::<Vec<_>>()}),
        Node::Product(l, r) => json!({"node": "product", "left": expr_to_value(l), "right": expr_to_value(r)}),
        Node::Sum(l, r) => json!({"node": "sum", "left": expr_to_value(l), "right": expr_to_value(r)}),
        Node::ScalarScale(c, inner) => json!({"node": "scale", "factor": complex_to_value(*c), "expr": expr_to_value(inner)}),
        Node::Lft(theta, param) => {
            let kind = match theta.kind() {
                ThetaKind::Vanishing => "vanishing",
                ThetaKind::Tangential => "tangential",
            };
            json!({
                "node": "lft",
                "theta": {
                    "kind": kind,
                    "nu": vector_to_value(theta.nu().coords()),
                    "xi": vector_to_value(theta.xi()),
                    "eta": vector_to_value(theta.eta()),
                },
                "param": expr_to_value(param),
            })
        }
        Node::ComposeEmbedding(embedding, inner) => json!({
            "node": "compose_embedding",
            "embedding": embedding_to_value(embedding),
            "inner": expr_to_value(inner),
        }),
    }
}

pub fn expr_from_value(value: &Value) -> Result<MultiplierExpr> {
    expr_at(value, "")
}

fn sub_expr(map: &Map<String, Value>, key: &str, path: &str) -> Result<MultiplierExpr> {
    let (v, at) = field(map, key, path)?;
    expr_at(v, &at)
}

fn expr_at(value: &Value, path: &str) -> Result<MultiplierExpr> {
    let map = object(value, path)?;
    let (tag, tag_at) = field(map, "node", path)?;
    let build = |r: Result<MultiplierExpr>| r.map_err(|e| located(e, path));
    match tag.as_str() {
        Some("const") => {
            let (m, at) = field(map, "matrix", path)?;
            Ok(MultiplierExpr::constant(matrix_from_value(m, &at)?))
        }
        Some("blaschke_row") => {
            let (a, at) = field(map, "alpha", path)?;
            build(MultiplierExpr::blaschke_row(point_from_value(a, &at)?))
        }
        Some(t @ ("hcat" | "vcat")) => {
            let (parts, at) = field(map, "parts", path)?;
            let parts = array(parts, &at)?
                .iter()
                .enumerate()
                .map(|(i, p)| expr_at(p, &child(&at, i)))
                .collect::<Result<Vec<_>>>()?;
            build(if t == "hcat" {
                MultiplierExpr::hcat(parts)
            } else {
                MultiplierExpr::vcat(parts)
            })
        }
        Some("product") => build(MultiplierExpr::product(
            sub_expr(map, "left", path)?,
            sub_expr(map, "right", path)?,
        )),
        Some("sum") => build(MultiplierExpr::sum(
            sub_expr(map, "left", path)?,
            sub_expr(map, "right", path)?,
        )),
        Some("scale") => {
            let (f, at) = field(map, "factor", path)?;
            Ok(MultiplierExpr::scale(complex_from_value(f, &at)?, sub_expr(map, "expr", path)?))
        }
        Some("lft") => {
            let (t, t_at) = field(map, "theta", path)?;
            let tmap = object(t, &t_at)?;
            let (nu, nu_at) = field(tmap, "nu", &t_at)?;
            let nu = point_from_value(nu, &nu_at)?;
            let (kind, kind_at) = field(tmap, "kind", &t_at)?;
            let theta = match kind.as_str() {
                Some("vanishing") => theta_vanishing(&nu),
                Some("tangential") => {
                    let (xi, xi_at) = field(tmap, "xi", &t_at)?;
                    let (eta, eta_at) = field(tmap, "eta", &t_at)?;
                    theta_tangential(&nu, &vector_from_value(xi, &xi_at)?, &vector_from_value(eta, &eta_at)?)
                }
                _ => return Err(malformed(&kind_at, "unknown theta kind")),
            }
            .map_err(|e| located(e, &t_at))?;
            build(MultiplierExpr::lft(theta, sub_expr(map, "param", path)?))
        }
        Some("compose_embedding") => {
            let (e, at) = field(map, "embedding", path)?;
            let embedding = embedding_from_value(e, &at)?;
            build(sub_expr(map, "inner", path)?.compose_embedding(embedding))
        }
        Some(other) => Err(malformed(&tag_at, format!("unknown node tag \"{other}\""))),
        None => Err(malformed(&tag_at, "node tag must be a string")),
    }
}

/// `{"schema_version": 1, "expr": ..., "step_log": ...}`.
pub fn solution_document(solution: &CentralSolution) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "expr": expr_to_value(&solution.solution),
        "step_log": serde_json::to_value(&solution.log).expect("step log serializes"),
    })
}

/// Reads a solution document or a bare expression node.
pub fn expr_from_document(value: &Value) -> Result<MultiplierExpr> {
    let map = object(value, "")?;
    if map.contains_key("node") {
        return expr_from_value(value);
    }
    if let Some(version) = map.get("schema_version") {
        if version.as_u64() != Some(SCHEMA_VERSION) {
            return Err(malformed("/schema_version", format!("unsupported schema version {version}")));
        }
    }
    let (e, at) = field(map, "expr", "")?;
    expr_at(e, &at)
}

pub fn problem_to_value(problem: &InterpolationProblem) -> Value {
    let conditions: Vec<Value> = problem
        .conditions()
        .iter()
        .zip(problem.domain_points())
        .map(|(c, w)| json!({"nu": vector_to_value(w), "xi": vector_to_value(&c.xi), "eta": vector_to_value(&c.eta)}))
        .collect();
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "N": problem.n(),
        "p": problem.p(),
        "q": problem.q(),
        "conditions": conditions,
    });
    if let Some(e) = problem.embedding() {
        doc["embedding"] = embedding_to_value(e);
    }
    doc
}

/// `{"N", "p", "q", "conditions": [{"nu", "xi", "eta"}], "embedding"?}`. With an
/// embedding, each `nu` is a domain point and `N` must equal its target dimension.
pub fn problem_from_value(value: &Value) -> Result<InterpolationProblem> {
    let map = object(value, "")?;
    let n = usize_field(map, "N", "")?;
    let p = usize_field(map, "p", "")?;
    let q = usize_field(map, "q", "")?;
    let (conds, conds_at) = field(map, "conditions", "")?;
    let mut raw = Vec::new();
    for (i, c) in array(conds, &conds_at)?.iter().enumerate() {
        let at = child(&conds_at, i);
        let cmap = object(c, &at)?;
        let get = |key: &str, len: usize| -> Result<CVector> {
            let (v, v_at) = field(cmap, key, &at)?;
            let vec = vector_from_value(v, &v_at)?;
            if vec.len() != len {
                return Err(malformed(&v_at, format!("expected {len} entries, found {}", vec.len())));
            }
            Ok(vec)
        };
        let xi = get("xi", p)?;
        let eta = get("eta", q)?;
        let (nu, nu_at) = field(cmap, "nu", &at)?;
        raw.push((vector_from_value(nu, &nu_at)?, xi, eta, nu_at));
    }
    match map.get("embedding") {
        None | Some(Value::Null) => {
            let conditions = raw
                .into_iter()
                .map(|(nu, xi, eta, at)| {
                    if nu.len() != n {
                        return Err(malformed(&at, format!("expected {n} entries, found {}", nu.len())));
                    }
                    Ok(TangentialCondition::new(BallPoint::new(nu).map_err(|e| located(e, &at))?, xi, eta))
                })
                .collect::<Result<Vec<_>>>()?;
            InterpolationProblem::new(n, p, q, conditions).map_err(|e| located(e, ""))
        }
        Some(e) => {
            let embedding = embedding_from_value(e, "/embedding")?;
            if embedding.target_dim() != n {
                return Err(malformed("/N", format!("embedding target dimension is {}", embedding.target_dim())));
            }
            for (w, _, _, at) in &raw {
                if w.len() != embedding.domain_dim() {
                    return Err(malformed(at, format!("expected {} entries, found {}", embedding.domain_dim(), w.len())));
                }
                embedding.map_into_ball(w).map_err(|err| located(err, at))?;
            }
            let conditions = raw.into_iter().map(|(w, xi, eta, _)| (w, xi, eta)).collect();
            InterpolationProblem::with_embedding(embedding, p, q, conditions).map_err(|e| located(e, ""))
        }
    }
}

/// An array of points, or `{"points": [...]}`.
pub fn points_from_value(value: &Value) -> Result<Vec<CVector>> {
    let (pts, at) = match value {
        Value::Object(map) => field(map, "points", "")?,
        _ => (value, String::new()),
    };
    array(pts, &at)?
        .iter()
        .enumerate()
        .map(|(i, p)| vector_from_value(p, &child(&at, i)))
        .collect()
}
