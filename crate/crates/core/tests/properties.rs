use ballschur::json::{expr_from_document, problem_from_value, problem_to_value, solution_document};
use ballschur::sampling;
use ballschur::{
    lft_step, solvability_check, solve_central, theta_tangential, transport_condition,
    verify_solution, CVector, InterpolationProblem, TangentialCondition, VerifyOptions, C64,
};
use proptest::prelude::*;

fn problem_strategy() -> impl Strategy<Value = (u64, usize, usize, usize, usize)> {
    (any::<u64>(), 1usize..=3, 1usize..=2, 1usize..=2, 1usize..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn central_solutions_interpolate_in_every_order((seed, n, p, q, m) in problem_strategy()) {
        let mut rng = sampling::rng(seed);
        let (_, problem) = sampling::certified_problem(&mut rng, n, p, q, m, 0.9);
        let reversed: Vec<usize> = (0..m).rev().collect();
        for candidate in [problem.clone(), problem.permuted(&reversed).unwrap()] {
            let solved = solve_central(&candidate).unwrap();
            for (cond, w) in problem.conditions().iter().zip(problem.domain_points()) {
                prop_assert!(cond.residual(&solved.solution.eval(w).unwrap()) < 1e-8);
            }
            for (k, step) in solved.log.steps.iter().enumerate() {
                prop_assert_eq!(step.param_shape.0, p + (k + 1) * (n - 1));
                prop_assert!(step.margin > 0.0);
            }
        }
    }

    #[test]
    fn stepwise_margins_agree_with_pick((seed, n, p, q, m) in problem_strategy(), scale in 0.2f64..3.0) {
        let mut rng = sampling::rng(seed);
        let (_, problem) = sampling::certified_problem(&mut rng, n, p, q, m, 0.9);
        let scaled: Vec<TangentialCondition> = problem
            .conditions()
            .iter()
            .map(|c| TangentialCondition::new(c.nu.clone(), c.xi.clone(), &c.eta * C64::new(scale, 0.0)))
            .collect();
        let scaled = InterpolationProblem::new(n, p, q, scaled).unwrap();
        let report = solvability_check(&scaled);
        let min = report.pick_eigenvalues[0];
        let top = report.pick_eigenvalues.last().copied().unwrap();
        // away from the boundary of feasibility the two tests must agree
        if min.abs() > 1e-6 * top.max(1.0) {
            prop_assert_eq!(report.solvable, min > 0.0);
        }
    }

    #[test]
    fn transport_matches_the_step((seed, n, p) in (any::<u64>(), 1usize..=3, 1usize..=3)) {
        let mut rng = sampling::rng(seed);
        let nu = sampling::ball_point(&mut rng, n, 0.9);
        let xi = sampling::nonzero_vector(&mut rng, p);
        let eta = CVector::from_element(1, sampling::disc_point(&mut rng) * (0.9 * xi.norm()));
        let theta = theta_tangential(&nu, &xi, &eta).unwrap();
        let other = TangentialCondition::new(
            sampling::ball_point(&mut rng, n, 0.9),
            sampling::nonzero_vector(&mut rng, p),
            sampling::complex_vector(&mut rng, 1),
        );
        let moved = transport_condition(&theta, &other).unwrap();
        let (rows, cols) = theta.param_shape();
        let param = sampling::certified_multiplier(&mut rng, n, rows, cols, 0.9);
        let sigma = param.eval(other.nu.coords()).unwrap();
        let s = lft_step(&theta, param).unwrap().eval(other.nu.coords()).unwrap();
        let den = theta.c_block(&other.nu).unwrap() * &sigma + theta.d_block();
        let lhs = (other.xi.adjoint() * s - other.eta.adjoint()) * den;
        let rhs = moved.xi.adjoint() * &sigma - moved.eta.adjoint();
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn documents_round_trip((seed, n, p, q, m) in problem_strategy()) {
        let mut rng = sampling::rng(seed);
        let (_, problem) = sampling::certified_problem(&mut rng, n, p, q, m, 0.9);
        let again = problem_from_value(&problem_to_value(&problem)).unwrap();
        prop_assert_eq!(&again, &problem);
        let solved = solve_central(&problem).unwrap();
        let text = serde_json::to_string(&solution_document(&solved)).unwrap();
        let back = expr_from_document(&serde_json::from_str(&text).unwrap()).unwrap();
        for z in sampling::ball_points(&mut rng, n, 10, 0.95) {
            prop_assert_eq!(solved.solution.eval(z.coords()).unwrap(), back.eval(z.coords()).unwrap());
        }
    }
}

#[test]
fn verification_of_central_solutions_passes_on_a_seeded_batch() {
    let mut rng = sampling::rng(77);
    for k in 0..30 {
        let (_, problem) = sampling::certified_problem(&mut rng, 2, 2, 2, 3, 0.9);
        let solved = solve_central(&problem).unwrap();
        let options = VerifyOptions { seed: k, ..VerifyOptions::default() };
        let report = verify_solution(&problem, &solved.solution, &options).unwrap();
        assert!(report.passes(), "{:?}", report.worst_offender());
        assert_eq!(report.poincare.len(), 3);
        assert!(report.poincare.iter().all(|p| p.hypothesis_holds));
    }
}
