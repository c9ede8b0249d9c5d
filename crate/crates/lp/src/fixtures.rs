//! Small LPs with optima worked out by hand, used as a regression suite for
//! any [`crate::LpSolver`].

use crate::problem::{LpProblem, RowKind, Sense};
use crate::simplex::LpStatus;

pub struct KnownLp {
    pub name: &'static str,
    pub problem: LpProblem,
    pub status: LpStatus,
    /// Optimal objective value when `status` is optimal.
    pub optimum: f64,
}

fn lp(sense: Sense, objective: &[f64]) -> LpProblem {
    let mut p = LpProblem::new(sense, objective.len());
    p.objective = objective.to_vec();
    p
}

fn row(p: &mut LpProblem, coeffs: &[f64], kind: RowKind, rhs: f64) {
    let label = format!("r{}", p.n_rows());
    p.add_row(label, coeffs.iter().copied().enumerate(), kind, rhs);
}

fn optimal(name: &'static str, problem: LpProblem, optimum: f64) -> KnownLp {
    KnownLp { name, problem, status: LpStatus::Optimal, optimum }
}

fn failing(name: &'static str, problem: LpProblem, status: LpStatus) -> KnownLp {
    KnownLp { name, problem, status, optimum: f64::NAN }
}

pub fn known_optima() -> Vec<KnownLp> {
    use RowKind::{Eq, Ge, Le};
    use Sense::{Maximize as Max, Minimize as Min};
    let mut out = Vec::new();

    let mut p = lp(Max, &[1.0]);
    row(&mut p, &[1.0], Le, 3.0);
    out.push(optimal("single upper row", p, 3.0));

    let mut p = lp(Max, &[1.0, 1.0]);
    row(&mut p, &[1.0, 1.0], Le, 1.0);
    out.push(optimal("optimal face", p, 1.0));

    let mut p = lp(Max, &[1.0]);
    row(&mut p, &[1.0], Le, -1.0);
    out.push(failing("negative cap on non-negative variable", p, LpStatus::Infeasible));

    let mut p = lp(Max, &[1.0, 0.0]);
    row(&mut p, &[1.0, -1.0], Le, 1.0);
    out.push(failing("ray along x = y", p, LpStatus::Unbounded));

    let mut p = lp(Max, &[3.0, 5.0]);
    row(&mut p, &[1.0, 0.0], Le, 4.0);
    row(&mut p, &[0.0, 2.0], Le, 12.0);
    row(&mut p, &[3.0, 2.0], Le, 18.0);
    out.push(optimal("three caps", p, 36.0));

    let mut p = lp(Min, &[2.0, 3.0]);
    row(&mut p, &[1.0, 1.0], Ge, 4.0);
    row(&mut p, &[1.0, 3.0], Ge, 6.0);
    out.push(optimal("covering minimum", p, 9.0));

    let mut p = lp(Max, &[1.0, 2.0, 3.0]);
    row(&mut p, &[1.0, 1.0, 1.0], Eq, 1.0);
    out.push(optimal("simplex vertex", p, 3.0));

    // Cycles under textbook Dantzig pricing without anti-cycling.
    let mut p = lp(Min, &[-0.75, 150.0, -0.02, 6.0]);
    row(&mut p, &[0.25, -60.0, -0.04, 9.0], Le, 0.0);
    row(&mut p, &[0.5, -90.0, -0.02, 3.0], Le, 0.0);
    row(&mut p, &[0.0, 0.0, 1.0, 0.0], Le, 1.0);
    out.push(optimal("degenerate cycling example", p, -0.05));

    let mut p = lp(Min, &[1.0]);
    p.set_free(0);
    row(&mut p, &[1.0], Ge, -5.0);
    out.push(optimal("free variable floor", p, -5.0));

    let mut p = lp(Max, &[1.0, 1.0]);
    p.set_bounds(0, 0.0, 2.0);
    p.set_bounds(1, 0.0, 3.0);
    row(&mut p, &[1.0, 1.0], Le, 4.0);
    out.push(optimal("boxed variables", p, 4.0));

    let mut p = lp(Min, &[1.0, 1.0]);
    p.set_bounds(0, -2.0, f64::INFINITY);
    p.set_bounds(1, -3.0, 1.0);
    out.push(optimal("negative lower bounds only", p, -5.0));

    let mut p = lp(Max, &[-1.0]);
    p.set_bounds(0, f64::NEG_INFINITY, 7.0);
    row(&mut p, &[1.0], Ge, 2.0);
    out.push(optimal("upper-bounded variable", p, -2.0));

    let mut p = lp(Max, &[1.0, -1.0]);
    row(&mut p, &[1.0, 1.0], Eq, 2.0);
    row(&mut p, &[2.0, 2.0], Eq, 4.0);
    out.push(optimal("duplicated equality", p, 2.0));

    let mut p = lp(Max, &[1.0, 1.0]);
    row(&mut p, &[1.0, 1.0], Eq, 1.0);
    row(&mut p, &[1.0, 1.0], Eq, 2.0);
    out.push(failing("contradictory equalities", p, LpStatus::Infeasible));

    let mut p = lp(Min, &[1.0, 1.0]);
    row(&mut p, &[1.0, 2.0], Ge, 4.0);
    row(&mut p, &[3.0, 1.0], Ge, 6.0);
    out.push(optimal("two covering rows", p, 2.8));

    let mut p = lp(Max, &[1.0, 1.0]);
    p.set_bounds(0, 1.5, 1.5);
    row(&mut p, &[1.0, 1.0], Le, 4.0);
    row(&mut p, &[0.0, 1.0], Le, 2.0);
    out.push(optimal("fixed variable", p, 3.5));

    let mut p = lp(Min, &[1.0, -1.0]);
    row(&mut p, &[1.0, 0.0], Ge, 1.0);
    out.push(failing("minimization ray", p, LpStatus::Unbounded));

    let mut p = lp(Max, &[2.0, 3.0, 4.0]);
    row(&mut p, &[3.0, 2.0, 1.0], Le, 10.0);
    row(&mut p, &[2.0, 5.0, 3.0], Le, 15.0);
    out.push(optimal("three variables", p, 20.0));

    let mut p = lp(Max, &[0.0, 0.0]);
    row(&mut p, &[1.0, 1.0], Ge, 1.0);
    out.push(optimal("pure feasibility", p, 0.0));

    let mut p = lp(Max, &[1.0]);
    row(&mut p, &[1.0], Le, 1.0);
    row(&mut p, &[1.0], Le, 1.0);
    row(&mut p, &[2.0], Le, 2.0);
    row(&mut p, &[-1.0], Ge, -1.0);
    out.push(optimal("degenerate vertex with repeated rows", p, 1.0));

    out
}
