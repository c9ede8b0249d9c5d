use prgsr_lp::fixtures::known_optima;
use prgsr_lp::{dump, parse, DenseSimplex, LpProblem, LpSolver, LpStatus, RowKind, Sense};
use proptest::prelude::*;

#[test]
fn known_optima_are_reproduced() {
    let suite = known_optima();
    assert_eq!(suite.len(), 20);
    let solver = DenseSimplex::default();
    for case in &suite {
        let sol = solver.solve(&case.problem);
        assert_eq!(sol.status, case.status, "{}", case.name);
        if case.status == LpStatus::Optimal {
            assert!((sol.objective - case.optimum).abs() <= 1e-8, "{}: {} vs {}", case.name, sol.objective, case.optimum);
            assert!(case.problem.max_row_violation(&sol.x) <= 1e-7, "{}", case.name);
            assert!(case.problem.max_bound_violation(&sol.x) <= 1e-9, "{}", case.name);
        }
    }
}

#[test]
fn text_dump_round_trips() {
    for case in known_optima() {
        let text = dump(&case.problem);
        assert_eq!(parse(&text).unwrap(), case.problem, "{}", case.name);
    }
}

#[test]
fn solve_many_matches_independent_solves() {
    let mut p = LpProblem::new(Sense::Maximize, 3);
    p.add_row("a", [(0, 3.0), (1, 2.0), (2, 1.0)], RowKind::Le, 10.0);
    p.add_row("b", [(0, 2.0), (1, 5.0), (2, 3.0)], RowKind::Le, 15.0);
    let objectives = vec![vec![2.0, 3.0, 4.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![-1.0, -1.0, -1.0]];
    let solver = DenseSimplex::default();
    let many = solver.solve_many(&p, &objectives);
    for (c, got) in objectives.iter().zip(&many) {
        let mut q = p.clone();
        q.objective.clone_from(c);
        let single = solver.solve(&q);
        assert!((single.objective - got.objective).abs() < 1e-10);
    }
    assert!((many[0].objective - 20.0).abs() < 1e-10);
    assert!((many[1].objective - 10.0 / 3.0).abs() < 1e-10);
    assert!((many[2].objective - 3.0).abs() < 1e-10);
    assert!(many[3].objective.abs() < 1e-12);
}

/// Random bounded LP: `max c·x`, `A x <= b` with `b > 0` and a box, so the
/// origin is feasible and the optimum is finite.
fn random_lp() -> impl Strategy<Value = LpProblem> {
    (1usize..6, 1usize..6).prop_flat_map(|(n, m)| {
        (prop::collection::vec(-5.0f64..5.0, n), prop::collection::vec(prop::collection::vec(-3.0f64..3.0, n), m), prop::collection::vec(0.1f64..5.0, m))
            .prop_map(move |(c, a, b)| {
                let mut p = LpProblem::new(Sense::Maximize, n);
                p.objective = c;
                for j in 0..n {
                    p.set_bounds(j, 0.0, 10.0);
                }
                for (coeffs, rhs) in a.into_iter().zip(b) {
                    p.add_row("r", coeffs.into_iter().enumerate(), RowKind::Le, rhs);
                }
                p
            })
    })
}

proptest! {
    #[test]
    fn scaling_objective_scales_optimum(p in random_lp(), scale in 0.01f64..100.0) {
        let solver = DenseSimplex::default();
        let base = solver.solve(&p);
        prop_assert_eq!(base.status, LpStatus::Optimal);
        let mut q = p.clone();
        q.objective.iter_mut().for_each(|c| *c *= scale);
        let scaled = solver.solve(&q);
        prop_assert_eq!(scaled.status, LpStatus::Optimal);
        prop_assert!((scaled.objective - scale * base.objective).abs() <= 1e-8 * (1.0 + scaled.objective.abs()));
    }

    #[test]
    fn redundant_row_keeps_optimum(p in random_lp(), pick in 0usize..64, slack in 0.0f64..2.0) {
        let solver = DenseSimplex::default();
        let base = solver.solve(&p);
        prop_assert_eq!(base.status, LpStatus::Optimal);
        let mut q = p.clone();
        let src = q.rows[pick % q.rows.len()].clone();
        q.add_row("redundant", src.coeffs.iter().map(|&(j, c)| (j, 2.0 * c)), RowKind::Le, 2.0 * src.rhs + slack);
        let again = solver.solve(&q);
        prop_assert_eq!(again.status, LpStatus::Optimal);
        prop_assert!((again.objective - base.objective).abs() <= 1e-8 * (1.0 + base.objective.abs()));
    }

    #[test]
    fn optimum_dominates_random_feasible_points(p in random_lp(), pts in prop::collection::vec(prop::collection::vec(0.0f64..10.0, 6), 20)) {
        let solver = DenseSimplex::default();
        let sol = solver.solve(&p);
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        for pt in pts {
            let x = &pt[..p.n_vars()];
            if p.max_row_violation(x) == 0.0 {
                prop_assert!(p.objective_value(x) <= sol.objective + 1e-9);
            }
        }
    }
}
