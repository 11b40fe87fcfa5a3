//! Fixtures shared by the benchmarks.

use ballschur::sampling::{self, SampleRng};
use ballschur::{CVector, InterpolationProblem, MultiplierExpr};

/// A seeded problem with `m` conditions from a certified multiplier.
pub fn problem(seed: u64, n: usize, p: usize, q: usize, m: usize) -> InterpolationProblem {
    sampling::certified_problem(&mut sampling::rng(seed), n, p, q, m, 0.9).1
}

/// A seeded certified multiplier.
pub fn multiplier(seed: u64, n: usize, p: usize, q: usize) -> MultiplierExpr {
    sampling::certified_multiplier(&mut sampling::rng(seed), n, p, q, 0.9)
}

pub fn points(rng: &mut SampleRng, n: usize, count: usize) -> Vec<CVector> {
    sampling::ball_points(rng, n, count, 0.95)
        .into_iter()
        .map(|p| p.coords().clone())
        .collect()
}
