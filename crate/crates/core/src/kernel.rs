//! Drury-Arveson and pullback kernels with their Pick matrices.
//!
//! The sampled Schur-class test also lives here.

use crate::ball::{pairing, BallPoint, BALL_MARGIN};
use crate::error::{Error, Result};
use crate::expr::MultiplierExpr;
use crate::hermitian::{psd_check, HermitianMatrix, PsdReport};
use crate::{CMatrix, CVector, C64};

/// `coeff · Π z_i^{exponents[i]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: C64,
    pub exponents: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    domain_dim: usize,
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn new(domain_dim: usize, terms: Vec<Monomial>) -> Result<Self> {
        for t in &terms {
            if t.exponents.len() != domain_dim {
                return Err(Error::DimensionMismatch {
                    context: "polynomial term exponents",
                    expected: domain_dim,
                    found: t.exponents.len(),
                });
            }
        }
        Ok(Self { domain_dim, terms })
    }

    pub fn constant(domain_dim: usize, value: C64) -> Self {
        Self {
            domain_dim,
            terms: vec![Monomial {
                coeff: value,
                exponents: vec![0; domain_dim],
            }],
        }
    }

    /// The coordinate function `z_index`.
    pub fn coordinate(domain_dim: usize, index: usize) -> Self {
        let mut exponents = vec![0; domain_dim];
        exponents[index] = 1;
        Self {
            domain_dim,
            terms: vec![Monomial {
                coeff: C64::new(1.0, 0.0),
                exponents,
            }],
        }
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    /// Sum of absolute coefficients; bounds `|P(z)|` on the closed unit polydisc.
    pub fn coefficient_mass(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    pub fn eval(&self, z: &CVector) -> Result<C64> {
        if z.len() != self.domain_dim {
            return Err(Error::DimensionMismatch {
                context: "polynomial argument",
                expected: self.domain_dim,
                found: z.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|t| {
                t.exponents
                    .iter()
                    .zip(z.iter())
                    .fold(t.coeff, |acc, (&e, zi)| acc * zi.powu(e))
            })
            .sum())
    }
}

/// A polynomial map `β: C^d → C^N` expected to land in the ball on the points
/// it is evaluated at.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSpec {
    domain_dim: usize,
    components: Vec<Polynomial>,
}

impl EmbeddingSpec {
    pub fn new(domain_dim: usize, components: Vec<Polynomial>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyInput);
        }
        for c in &components {
            if c.domain_dim != domain_dim {
                return Err(Error::DimensionMismatch {
                    context: "embedding component domain",
                    expected: domain_dim,
                    found: c.domain_dim,
                });
            }
        }
        Ok(Self {
            domain_dim,
            components,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            domain_dim: n,
            components: (0..n).map(|i| Polynomial::coordinate(n, i)).collect(),
        }
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn target_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn eval(&self, z: &CVector) -> Result<CVector> {
        let values = self
            .components
            .iter()
            .map(|c| c.eval(z))
            .collect::<Result<Vec<_>>>()?;
        Ok(CVector::from_vec(values))
    }

    /// `β(z)` as a ball point, or [`Error::EmbeddingEscapesBall`].
    pub fn map_into_ball(&self, z: &CVector) -> Result<BallPoint> {
        let image = self.eval(z)?;
        let norm = image.norm();
        if !(norm <= 1.0 - BALL_MARGIN) {
            return Err(Error::EmbeddingEscapesBall { norm });
        }
        BallPoint::new(image)
    }
}

/// A complete Nevanlinna-Pick kernel: Drury-Arveson on `B_N`, or
/// `δ(z) conj(δ(w)) / (1 - <β(z), β(w)>)`.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    DruryArveson { n: usize },
    Pullback {
        embedding: EmbeddingSpec,
        delta: Polynomial,
    },
}

impl KernelSpec {
    /// `K_β` with `δ ≡ 1`.
    pub fn pullback_unit(embedding: EmbeddingSpec) -> Self {
        let delta = Polynomial::constant(embedding.domain_dim(), C64::new(1.0, 0.0));
        KernelSpec::Pullback { embedding, delta }
    }

    pub fn domain_dim(&self) -> usize {
        match self {
            KernelSpec::DruryArveson { n } => *n,
            KernelSpec::Pullback { embedding, .. } => embedding.domain_dim(),
        }
    }

    /// Validates a pullback's `δ` against the embedding's domain.
    pub fn validated(self) -> Result<Self> {
        if let KernelSpec::Pullback { embedding, delta } = &self {
            if delta.domain_dim() != embedding.domain_dim() {
                return Err(Error::DimensionMismatch {
                    context: "pullback delta domain",
                    expected: embedding.domain_dim(),
                    found: delta.domain_dim(),
                });
            }
        }
        Ok(self)
    }
}

/// Per-point data reused across a Gram assembly.
enum Lifted {
    Ball(CVector),
    Pullback { image: CVector, delta: C64 },
}

fn lift(spec: &KernelSpec, z: &CVector) -> Result<Lifted> {
    match spec {
        KernelSpec::DruryArveson { n } => {
            if z.len() != *n {
                return Err(Error::DimensionMismatch {
                    context: "kernel point",
                    expected: *n,
                    found: z.len(),
                });
            }
            Ok(Lifted::Ball(BallPoint::new(z.clone())?.coords().clone()))
        }
        KernelSpec::Pullback { embedding, delta } => {
            let image = embedding.map_into_ball(z)?.coords().clone();
            let delta = delta.eval(z)?;
            if !(delta.norm() > 0.0) {
                return Err(Error::DeltaVanishes);
            }
            Ok(Lifted::Pullback { image, delta })
        }
    }
}

fn lifted_kernel(a: &Lifted, b: &Lifted) -> C64 {
    let one = C64::new(1.0, 0.0);
    match (a, b) {
        (Lifted::Ball(x), Lifted::Ball(y)) => one / (one - pairing(x, y)),
        (
            Lifted::Pullback { image: x, delta: dx },
            Lifted::Pullback { image: y, delta: dy },
        ) => dx * dy.conj() / (one - pairing(x, y)),
        _ => unreachable!("points lifted through one kernel"),
    }
}

pub fn kernel_eval(spec: &KernelSpec, z: &CVector, w: &CVector) -> Result<C64> {
    Ok(lifted_kernel(&lift(spec, z)?, &lift(spec, w)?))
}

/// Fills a block-Hermitian matrix from its upper block triangle.
fn assemble_blocks<F>(count: usize, block: usize, mut entry: F) -> Result<HermitianMatrix>
where
    F: FnMut(usize, usize) -> Result<CMatrix>,
{
    let n = count * block;
    let mut m = CMatrix::zeros(n, n);
    for i in 0..count {
        for j in i..count {
            let b = entry(i, j)?;
            m.view_mut((i * block, j * block), (block, block)).copy_from(&b);
            if i != j {
                m.view_mut((j * block, i * block), (block, block))
                    .copy_from(&b.adjoint());
            }
        }
    }
    HermitianMatrix::new(m)
}

/// `[k(z_i, z_j)]`.
pub fn gram_matrix(spec: &KernelSpec, points: &[CVector]) -> Result<HermitianMatrix> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let lifted = points.iter().map(|z| lift(spec, z)).collect::<Result<Vec<_>>>()?;
    assemble_blocks(points.len(), 1, |i, j| {
        Ok(CMatrix::from_element(1, 1, lifted_kernel(&lifted[i], &lifted[j])))
    })
}

/// A left-tangential datum `ξ* s(ν) = η*`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentialCondition {
    pub nu: BallPoint,
    pub xi: CVector,
    pub eta: CVector,
}

impl TangentialCondition {
    pub fn new(nu: BallPoint, xi: CVector, eta: CVector) -> Self {
        Self { nu, xi, eta }
    }

    pub fn p(&self) -> usize {
        self.xi.len()
    }

    pub fn q(&self) -> usize {
        self.eta.len()
    }

    /// `ξ*ξ - η*η`.
    pub fn margin(&self) -> f64 {
        self.xi.norm_squared() - self.eta.norm_squared()
    }

    pub fn is_strict(&self) -> bool {
        self.margin() > 0.0
    }

    /// `‖ξ* value - η*‖` for a `p x q` value.
    pub fn residual(&self, value: &CMatrix) -> f64 {
        (self.xi.adjoint() * value - self.eta.adjoint()).norm()
    }
}

/// `[(ξ_i*ξ_j - η_i*η_j) / (1 - <ν_i, ν_j>)]`.
pub fn pick_matrix(conditions: &[TangentialCondition]) -> Result<HermitianMatrix> {
    if let Some(first) = conditions.first() {
        for c in conditions {
            for (context, expected, found) in [
                ("pick condition xi", first.p(), c.p()),
                ("pick condition eta", first.q(), c.q()),
                ("pick condition nu", first.nu.dim(), c.nu.dim()),
            ] {
                if expected != found {
                    return Err(Error::DimensionMismatch {
                        context,
                        expected,
                        found,
                    });
                }
            }
        }
    }
    let one = C64::new(1.0, 0.0);
    assemble_blocks(conditions.len(), 1, |i, j| {
        let (a, b) = (&conditions[i], &conditions[j]);
        let num = a.xi.dotc(&b.xi) - a.eta.dotc(&b.eta);
        let den = one - pairing(a.nu.coords(), b.nu.coords());
        Ok(CMatrix::from_element(1, 1, num / den))
    })
}

/// Sampled Schur-class test: positivity of `[(I_p - s(z_i) s(z_j)*) k(z_i, z_j)]`,
/// point-major blocks.
pub fn schur_class_test(
    s: &MultiplierExpr,
    spec: &KernelSpec,
    points: &[CVector],
    tol: f64,
) -> Result<PsdReport> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (p, _) = s.shape();
    let lifted = points.iter().map(|z| lift(spec, z)).collect::<Result<Vec<_>>>()?;
    let values = points.iter().map(|z| s.eval(z)).collect::<Result<Vec<_>>>()?;
    let identity = CMatrix::identity(p, p);
    let m = assemble_blocks(points.len(), p, |i, j| {
        let k = lifted_kernel(&lifted[i], &lifted[j]);
        Ok((&identity - &values[i] * values[j].adjoint()) * k)
    })?;
    Ok(psd_check(&m, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::DEFAULT_PSD_TOL;
    use crate::sampling;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn vecc(v: &[C64]) -> CVector {
        CVector::from_column_slice(v)
    }

    fn scalar_condition(nu: C64, value: C64) -> TangentialCondition {
        TangentialCondition::new(
            BallPoint::from_slice(&[nu]).unwrap(),
            vecc(&[c(1.0)]),
            vecc(&[value.conj()]),
        )
    }

    #[test]
    fn drury_arveson_values() {
        let da = KernelSpec::DruryArveson { n: 2 };
        let zero = CVector::zeros(2);
        assert_eq!(kernel_eval(&da, &zero, &zero).unwrap(), c(1.0));
        let l = vecc(&[C64::new(0.3, 0.4), c(0.5)]);
        let k = kernel_eval(&da, &l, &l).unwrap();
        assert!((k - c(1.0 / (1.0 - 0.5))).norm() < 1e-15);
    }

    #[test]
    fn identity_pullback_matches_drury_arveson() {
        let da = KernelSpec::DruryArveson { n: 3 };
        let pb = KernelSpec::pullback_unit(EmbeddingSpec::identity(3));
        let mut rng = sampling::rng(21);
        for _ in 0..100 {
            let z = sampling::ball_point(&mut rng, 3, 0.95).coords().clone();
            let w = sampling::ball_point(&mut rng, 3, 0.95).coords().clone();
            let a = kernel_eval(&da, &z, &w).unwrap();
            let b = kernel_eval(&pb, &z, &w).unwrap();
            assert!((a - b).norm() < 1e-14);
            let back = kernel_eval(&da, &w, &z).unwrap();
            assert!((a - back.conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn pullback_errors() {
        let squash = EmbeddingSpec::new(
            1,
            vec![Polynomial::new(
                1,
                vec![Monomial {
                    coeff: c(2.0),
                    exponents: vec![1],
                }],
            )
            .unwrap()],
        )
        .unwrap();
        let spec = KernelSpec::pullback_unit(squash.clone());
        let z = vecc(&[c(0.9)]);
        assert!(matches!(
            kernel_eval(&spec, &z, &z),
            Err(Error::EmbeddingEscapesBall { .. })
        ));
        let spec = KernelSpec::Pullback {
            embedding: EmbeddingSpec::identity(1),
            delta: Polynomial::coordinate(1, 0),
        };
        let zero = vecc(&[c(0.0)]);
        assert_eq!(kernel_eval(&spec, &zero, &zero), Err(Error::DeltaVanishes));
    }

    #[test]
    fn gram_single_points() {
        let da = KernelSpec::DruryArveson { n: 2 };
        let g = gram_matrix(&da, &[CVector::zeros(2)]).unwrap();
        assert_eq!(g.entries()[(0, 0)], c(1.0));
        let nu = vecc(&[C64::new(0.2, -0.1), c(0.6)]);
        let g = gram_matrix(&da, std::slice::from_ref(&nu)).unwrap();
        let expected = 1.0 / (1.0 - nu.norm_squared());
        assert!((g.entries()[(0, 0)] - c(expected)).norm() < 1e-15);
        assert_eq!(gram_matrix(&da, &[]), Err(Error::EmptyInput));
    }

    #[test]
    fn gram_is_psd_on_samples() {
        let da = KernelSpec::DruryArveson { n: 2 };
        let mut rng = sampling::rng(22);
        let pts: Vec<CVector> = sampling::ball_points(&mut rng, 2, 20, 0.95)
            .into_iter()
            .map(|p| p.coords().clone())
            .collect();
        assert!(psd_check(&gram_matrix(&da, &pts).unwrap(), DEFAULT_PSD_TOL).is_psd);
    }

    #[test]
    fn pick_single_conditions() {
        let p = pick_matrix(&[scalar_condition(c(0.0), c(0.5))]).unwrap();
        assert!((p.entries()[(0, 0)] - c(0.75)).norm() < 1e-15);
        let p = pick_matrix(&[scalar_condition(c(0.0), c(1.0))]).unwrap();
        assert_eq!(p.entries()[(0, 0)], c(0.0));
    }

    #[test]
    fn pick_two_disc_conditions() {
        let p = pick_matrix(&[
            scalar_condition(c(0.0), c(0.2)),
            scalar_condition(c(0.5), c(0.4)),
        ])
        .unwrap();
        // entries 0.96, 0.92, 0.84 / 0.75; eigenvalues from the 2x2 characteristic polynomial
        let (a, b, d) = (0.96, 0.92, 0.84 / 0.75);
        let tr: f64 = a + d;
        let disc = (tr * tr - 4.0 * (a * d - b * b)).sqrt();
        let (lo, hi) = ((tr - disc) / 2.0, (tr + disc) / 2.0);
        assert!((lo - 0.11652828955078409).abs() < 1e-12);
        let report = psd_check(&p, DEFAULT_PSD_TOL);
        assert!((report.min_eigenvalue - lo).abs() < 1e-12);
        assert!((report.max_eigenvalue - hi).abs() < 1e-12);
        assert!(report.min_eigenvalue > 0.0);
    }

    #[test]
    fn pick_dimension_mismatch() {
        let a = scalar_condition(c(0.0), c(0.5));
        let b = TangentialCondition::new(
            BallPoint::origin(1),
            vecc(&[c(1.0), c(0.0)]),
            vecc(&[c(0.0)]),
        );
        assert!(matches!(
            pick_matrix(&[a, b]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pick_of_sampled_multiplier_is_psd() {
        let mut rng = sampling::rng(23);
        for _ in 0..20 {
            let s = sampling::certified_multiplier(&mut rng, 2, 2, 2, 0.95);
            let conds: Vec<_> = (0..4)
                .map(|_| {
                    let nu = sampling::ball_point(&mut rng, 2, 0.95);
                    let xi = sampling::nonzero_vector(&mut rng, 2);
                    let eta = s.eval(nu.coords()).unwrap().adjoint() * &xi;
                    TangentialCondition::new(nu, xi, eta)
                })
                .collect();
            assert!(psd_check(&pick_matrix(&conds).unwrap(), DEFAULT_PSD_TOL).is_psd);
        }
    }

    #[test]
    fn schur_test_examples() {
        let da = KernelSpec::DruryArveson { n: 2 };
        let mut rng = sampling::rng(24);
        let pts: Vec<CVector> = sampling::ball_points(&mut rng, 2, 15, 0.95)
            .into_iter()
            .map(|p| p.coords().clone())
            .collect();
        let zero = MultiplierExpr::constant(CMatrix::zeros(1, 1));
        assert!(schur_class_test(&zero, &da, &pts, DEFAULT_PSD_TOL).unwrap().is_psd);

        let two = MultiplierExpr::constant(CMatrix::from_element(1, 1, c(2.0)));
        let r = schur_class_test(&two, &da, &[CVector::zeros(2)], DEFAULT_PSD_TOL).unwrap();
        assert!(!r.is_psd);
        assert!((r.min_eigenvalue + 3.0).abs() < 1e-14);

        let nu = sampling::ball_point(&mut rng, 2, 0.9);
        let b = MultiplierExpr::blaschke_row(nu).unwrap();
        assert!(schur_class_test(&b, &da, &pts, DEFAULT_PSD_TOL).unwrap().is_psd);
    }
}
