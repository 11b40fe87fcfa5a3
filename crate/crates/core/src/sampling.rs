//! Seeded random data. Multipliers built here are Schur class by
//! construction.
//!
//! Points are drawn uniformly in the polydisc and, when they land outside the
//! radius cap, pulled back radially to a uniform radius inside it.

use std::f64::consts::TAU;

pub use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ball::BallPoint;
use crate::expr::MultiplierExpr;
use crate::kernel::TangentialCondition;
use crate::solver::InterpolationProblem;
use crate::{CMatrix, CVector, C64};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in the closed unit disc.
pub fn disc_point<R: Rng>(rng: &mut R) -> C64 {
    let r = rng.random::<f64>().sqrt();
    C64::from_polar(r, TAU * rng.random::<f64>())
}

pub fn complex_vector<R: Rng>(rng: &mut R, n: usize) -> CVector {
    CVector::from_iterator(n, (0..n).map(|_| disc_point(rng)))
}

/// A nonzero random vector (entries in the unit disc, norm at least 0.1).
pub fn nonzero_vector<R: Rng>(rng: &mut R, n: usize) -> CVector {
    loop {
        let v = complex_vector(rng, n);
        if v.norm() >= 0.1 {
            return v;
        }
    }
}

pub fn complex_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| disc_point(rng))
}

pub fn ball_point<R: Rng>(rng: &mut R, n: usize, radius_cap: f64) -> BallPoint {
    let mut v = complex_vector(rng, n);
    let norm = v.norm();
    if norm > radius_cap {
        let radius = radius_cap * rng.random::<f64>().powf(1.0 / (2 * n) as f64);
        v *= C64::new(radius / norm, 0.0);
    }
    BallPoint::new(v).expect("radius cap keeps samples inside the ball")
}

pub fn ball_points<R: Rng>(rng: &mut R, n: usize, count: usize, radius_cap: f64) -> Vec<BallPoint> {
    (0..count).map(|_| ball_point(rng, n, radius_cap)).collect()
}

/// A random matrix rescaled to operator norm `norm`.
pub fn contraction<R: Rng>(rng: &mut R, rows: usize, cols: usize, norm: f64) -> CMatrix {
    loop {
        let m = complex_matrix(rng, rows, cols);
        let top = operator_norm(&m);
        if top > 1e-3 {
            return m * C64::new(norm / top, 0.0);
        }
    }
}

pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

/// A `p x q` multiplier on `B_N` with multiplier norm at most `rho`.
///
/// The result is `rho` times a convex combination of a constant contraction,
/// `L b_α R` and `L b_α E b_β R`, with `L`, `E`, `R` constant contractions. Each
/// term is a product of contractive multipliers, and the multiplier norm is
/// convex, so Schur-class membership holds by construction.
pub fn certified_multiplier<R: Rng>(rng: &mut R, n: usize, p: usize, q: usize, rho: f64) -> MultiplierExpr {
    let mut weights: Vec<f64> = (0..3).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);

    let constant = MultiplierExpr::constant(contraction(rng, p, q, 1.0));

    let single = {
        let b = MultiplierExpr::blaschke_row(ball_point(rng, n, 0.9)).expect("valid base point");
        let left = MultiplierExpr::constant(contraction(rng, p, 1, 1.0));
        let right = MultiplierExpr::constant(contraction(rng, n, q, 1.0));
        chain(&[left, b, right])
    };

    let double = {
        let b1 = MultiplierExpr::blaschke_row(ball_point(rng, n, 0.9)).expect("valid base point");
        let b2 = MultiplierExpr::blaschke_row(ball_point(rng, n, 0.9)).expect("valid base point");
        let left = MultiplierExpr::constant(contraction(rng, p, 1, 1.0));
        let mid = MultiplierExpr::constant(contraction(rng, n, 1, 1.0));
        let right = MultiplierExpr::constant(contraction(rng, n, q, 1.0));
        chain(&[left, b1, mid, b2, right])
    };

    let terms = [constant, single, double];
    let mut acc: Option<MultiplierExpr> = None;
    for (term, w) in terms.into_iter().zip(weights) {
        let scaled = MultiplierExpr::scale(C64::new(w, 0.0), term);
        acc = Some(match acc {
            None => scaled,
            Some(prev) => MultiplierExpr::sum(prev, scaled).expect("equal shapes"),
        });
    }
    MultiplierExpr::scale(C64::new(rho, 0.0), acc.expect("three terms"))
}

/// A problem with `m` conditions read off a certified multiplier of norm `rho`
/// at points of norm at most 0.9. Returns the multiplier alongside.
pub fn certified_problem<R: Rng>(
    rng: &mut R,
    n: usize,
    p: usize,
    q: usize,
    m: usize,
    rho: f64,
) -> (MultiplierExpr, InterpolationProblem) {
    let s = certified_multiplier(rng, n, p, q, rho);
    let conditions = (0..m)
        .map(|_| {
            let nu = ball_point(rng, n, 0.9);
            let xi = nonzero_vector(rng, p);
            let value = s.eval(nu.coords()).expect("certified multipliers evaluate in the ball");
            let eta = value.adjoint() * &xi;
            TangentialCondition::new(nu, xi, eta)
        })
        .collect();
    let problem = InterpolationProblem::new(n, p, q, conditions).expect("consistent dimensions");
    (s, problem)
}

fn chain(factors: &[MultiplierExpr]) -> MultiplierExpr {
    let mut iter = factors.iter().cloned();
    let first = iter.next().expect("nonempty chain");
    iter.fold(first, |acc, f| MultiplierExpr::product(acc, f).expect("chained shapes"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_respect_the_cap() {
        let mut r = rng(1);
        for n in [1, 2, 5] {
            for p in ball_points(&mut r, n, 200, 0.95) {
                assert!(p.norm() <= 0.95 + 1e-15);
            }
        }
    }

    #[test]
    fn seeding_is_reproducible() {
        let a = ball_points(&mut rng(7), 3, 5, 0.95);
        let b = ball_points(&mut rng(7), 3, 5, 0.95);
        assert_eq!(a, b);
    }

    #[test]
    fn contraction_has_requested_norm() {
        let m = contraction(&mut rng(3), 3, 2, 0.7);
        assert!((operator_norm(&m) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn certified_multiplier_is_pointwise_contractive() {
        let mut r = rng(4);
        let s = certified_multiplier(&mut r, 2, 2, 3, 0.9);
        assert_eq!(s.shape(), (2, 3));
        for p in ball_points(&mut r, 2, 50, 0.95) {
            let v = s.eval(p.coords()).unwrap();
            assert!(operator_norm(&v) <= 0.9 + 1e-12);
        }
    }
}
