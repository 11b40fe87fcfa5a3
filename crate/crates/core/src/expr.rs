//! A closed expression language for matrix-valued functions on the ball.
//!
//! Every object produced by the Schur algorithm (constants, Blaschke rows, block
//! compositions, linear-fractional steps, pullbacks by an embedding) is an
//! immutable [`MultiplierExpr`] tree. Shapes and domain dimensions are checked
//! when a node is built, so evaluation only fails on pointwise conditions
//! (domain escape, singular denominators).

use crate::ball::{BallPoint, BlaschkeRow};
use crate::error::{Error, Result};
use crate::kernel::EmbeddingSpec;
use crate::theta::ThetaFactor;
use crate::{CMatrix, CVector, C64};

/// Condition number above which a linear-fractional denominator is singular.
pub const LFT_CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(CMatrix),
    BlaschkeRow(BlaschkeRow),
    HCat(Vec<MultiplierExpr>),
    VCat(Vec<MultiplierExpr>),
    Product(Box<MultiplierExpr>, Box<MultiplierExpr>),
    Sum(Box<MultiplierExpr>, Box<MultiplierExpr>),
    ScalarScale(C64, Box<MultiplierExpr>),
    /// `(A s + B)(C s + D)^{-1}` with the blocks of a [`ThetaFactor`].
    Lft(Box<ThetaFactor>, Box<MultiplierExpr>),
    /// `z ↦ inner(β(z))`.
    ComposeEmbedding(EmbeddingSpec, Box<MultiplierExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierExpr {
    node: Node,
    shape: (usize, usize),
    /// `None` for expressions that accept points of any dimension (constants).
    domain: Option<usize>,
}

fn merge_domains(context: &'static str, a: Option<usize>, b: Option<usize>) -> Result<Option<usize>> {
    match (a, b) {
        (Some(x), Some(y)) if x != y => Err(Error::DimensionMismatch {
            context,
            expected: x,
            found: y,
        }),
        (Some(x), _) | (_, Some(x)) => Ok(Some(x)),
        (None, None) => Ok(None),
    }
}

impl MultiplierExpr {
    pub fn constant(matrix: CMatrix) -> Self {
        let shape = matrix.shape();
        Self {
            node: Node::Const(matrix),
            shape,
            domain: None,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::constant(CMatrix::zeros(rows, cols))
    }

    pub fn blaschke_row(alpha: BallPoint) -> Result<Self> {
        Ok(Self::from_blaschke(BlaschkeRow::new(alpha)?))
    }

    pub fn from_blaschke(row: BlaschkeRow) -> Self {
        let n = row.dim();
        Self {
            node: Node::BlaschkeRow(row),
            shape: (1, n),
            domain: Some(n),
        }
    }

    pub fn hcat(parts: Vec<MultiplierExpr>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::ShapeMismatch("hcat of no parts".into()))?;
        let rows = first.shape.0;
        let mut cols = 0;
        let mut domain = None;
        for p in &parts {
            if p.shape.0 != rows {
                return Err(Error::ShapeMismatch(format!(
                    "hcat parts have {} and {} rows",
                    rows, p.shape.0
                )));
            }
            cols += p.shape.1;
            domain = merge_domains("hcat domain", domain, p.domain)?;
        }
        Ok(Self {
            node: Node::HCat(parts),
            shape: (rows, cols),
            domain,
        })
    }

    pub fn vcat(parts: Vec<MultiplierExpr>) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::ShapeMismatch("vcat of no parts".into()))?;
        let cols = first.shape.1;
        let mut rows = 0;
        let mut domain = None;
        for p in &parts {
            if p.shape.1 != cols {
                return Err(Error::ShapeMismatch(format!(
                    "vcat parts have {} and {} columns",
                    cols, p.shape.1
                )));
            }
            rows += p.shape.0;
            domain = merge_domains("vcat domain", domain, p.domain)?;
        }
        Ok(Self {
            node: Node::VCat(parts),
            shape: (rows, cols),
            domain,
        })
    }

    pub fn product(left: MultiplierExpr, right: MultiplierExpr) -> Result<Self> {
        if left.shape.1 != right.shape.0 {
            return Err(Error::ShapeMismatch(format!(
                "product of {:?} and {:?}",
                left.shape, right.shape
            )));
        }
        let domain = merge_domains("product domain", left.domain, right.domain)?;
        Ok(Self {
            shape: (left.shape.0, right.shape.1),
            domain,
            node: Node::Product(Box::new(left), Box::new(right)),
        })
    }

    pub fn sum(left: MultiplierExpr, right: MultiplierExpr) -> Result<Self> {
        if left.shape != right.shape {
            return Err(Error::ShapeMismatch(format!(
                "sum of {:?} and {:?}",
                left.shape, right.shape
            )));
        }
        let domain = merge_domains("sum domain", left.domain, right.domain)?;
        Ok(Self {
            shape: left.shape,
            domain,
            node: Node::Sum(Box::new(left), Box::new(right)),
        })
    }

    pub fn scale(factor: C64, expr: MultiplierExpr) -> Self {
        Self {
            shape: expr.shape,
            domain: expr.domain,
            node: Node::ScalarScale(factor, Box::new(expr)),
        }
    }

    /// The linear-fractional node over `theta`, without the contractivity
    /// probe done by [`crate::theta::lft_step`].
    pub fn lft(theta: ThetaFactor, param: MultiplierExpr) -> Result<Self> {
        let expected = theta.param_shape();
        if param.shape != expected {
            return Err(Error::ShapeMismatch(format!(
                "lft parameter has shape {:?}, theta requires {:?}",
                param.shape, expected
            )));
        }
        let domain = merge_domains("lft domain", Some(theta.ball_dim()), param.domain)?;
        Ok(Self {
            shape: (theta.p(), theta.q()),
            domain,
            node: Node::Lft(Box::new(theta), Box::new(param)),
        })
    }

    /// `z ↦ self(β(z))`.
    pub fn compose_embedding(self, embedding: EmbeddingSpec) -> Result<Self> {
        if let Some(d) = self.domain {
            if d != embedding.target_dim() {
                return Err(Error::DimensionMismatch {
                    context: "compose_embedding target",
                    expected: d,
                    found: embedding.target_dim(),
                });
            }
        }
        Ok(Self {
            shape: self.shape,
            domain: Some(embedding.domain_dim()),
            node: Node::ComposeEmbedding(embedding, Box::new(self)),
        })
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn domain_dim(&self) -> Option<usize> {
        self.domain
    }

    pub fn eval(&self, point: &CVector) -> Result<CMatrix> {
        if let Some(d) = self.domain {
            if point.len() != d {
                return Err(Error::DimensionMismatch {
                    context: "evaluation point",
                    expected: d,
                    found: point.len(),
                });
            }
        }
        self.eval_inner(point)
    }

    fn eval_inner(&self, point: &CVector) -> Result<CMatrix> {
        match &self.node {
            Node::Const(m) => Ok(m.clone()),
            Node::BlaschkeRow(b) => Ok(b.eval_unchecked(in_ball(point)?.coords())),
            Node::HCat(parts) => {
                let values = parts.iter().map(|p| p.eval_inner(point)).collect::<Result<Vec<_>>>()?;
                let mut out = CMatrix::zeros(self.shape.0, self.shape.1);
                let mut col = 0;
                for v in values {
                    out.view_mut((0, col), v.shape()).copy_from(&v);
                    col += v.ncols();
                }
                Ok(out)
            }
            Node::VCat(parts) => {
                let values = parts.iter().map(|p| p.eval_inner(point)).collect::<Result<Vec<_>>>()?;
                let mut out = CMatrix::zeros(self.shape.0, self.shape.1);
                let mut row = 0;
                for v in values {
                    out.view_mut((row, 0), v.shape()).copy_from(&v);
                    row += v.nrows();
                }
                Ok(out)
            }
            Node::Product(l, r) => Ok(l.eval_inner(point)? * r.eval_inner(point)?),
            Node::Sum(l, r) => Ok(l.eval_inner(point)? + r.eval_inner(point)?),
            Node::ScalarScale(c, e) => Ok(e.eval_inner(point)? * *c),
            Node::Lft(theta, param) => {
                let lambda = in_ball(point)?;
                let value = param.eval_inner(point)?;
                theta.apply(&lambda, &value)
            }
            Node::ComposeEmbedding(embedding, inner) => {
                let image = embedding.eval(point)?;
                let norm = image.norm();
                if !(norm <= 1.0 - crate::ball::BALL_MARGIN) {
                    return Err(Error::DomainEscape { norm });
                }
                inner.eval_inner(&image)
            }
        }
    }

    /// Canonical JSON for this node (see [`crate::json`]).
    pub fn to_json(&self) -> serde_json::Value {
        crate::json::expr_to_value(self)
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        crate::json::expr_from_value(value)
    }
}

fn in_ball(point: &CVector) -> Result<BallPoint> {
    BallPoint::new(point.clone()).map_err(|_| Error::DomainEscape { norm: point.norm() })
}
