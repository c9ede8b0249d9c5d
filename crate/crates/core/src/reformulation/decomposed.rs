use prgsr_lp::{LpProblem, LpSolution, LpSolver, LpStatus, Sense};

use crate::ambiguity::AmbiguityModel;
use crate::functions::EPS_POS;
use crate::prospect::Prospect;
use crate::{Error, Result};

use super::assemble::add_weighting_rows;
use super::layout::Layout;
use super::value_space::ValueSpace;

/// Optimum of the worst-case program found slice by slice, with a primal
/// vector in the full program's variable layout.
#[derive(Debug, Clone)]
pub(crate) struct Decomposed {
    pub layout: Layout,
    pub h: f64,
    pub primal: Vec<f64>,
}

pub(crate) fn status_error(status: LpStatus, x: f64) -> Error {
    match status {
        LpStatus::Infeasible => Error::ElicitationInconsistent { x },
        other => Error::Lp(other),
    }
}

fn require_optimal(sol: &LpSolution, x: f64) -> Result<()> {
    if sol.is_optimal() {
        Ok(())
    } else {
        Err(status_error(sol.status, x))
    }
}

/// Every slice of the full program ranges over a positive multiple of the
/// same value polytope, so the optimum splits into one value maximization
/// per outcome followed by one weighting program per side.
pub(crate) fn solve(model: &AmbiguityModel, prospect: &Prospect, x: f64, solver: &dyn LpSolver) -> Result<Decomposed> {
    let layout = Layout::build(model, prospect, x)?;
    let space = ValueSpace::new(model, layout.grid.clone())?;
    let n = prospect.len();

    let mut needed = vec![false; n];
    for s in layout.sides() {
        for i in s.slice_outcome.iter().flatten() {
            needed[*i] = true;
        }
    }
    let outcomes: Vec<usize> = (0..n).filter(|&i| needed[i]).collect();
    let mut objectives: Vec<Vec<f64>> = outcomes.iter().map(|&i| space.value_coeffs(layout.split.shifted[i])).collect();
    if objectives.is_empty() {
        objectives.push(vec![0.0; space.n_pieces()]);
    }
    let sols = solver.solve_many(&space.problem, &objectives);
    for sol in &sols {
        require_optimal(sol, x)?;
    }
    let mut best = vec![0.0; n];
    let mut slopes: Vec<Option<&[f64]>> = vec![None; n];
    for (k, &i) in outcomes.iter().enumerate() {
        best[i] = sols[k].objective;
        slopes[i] = Some(&sols[k].x);
    }
    let fallback = &sols[0].x;

    let mut h = 0.0;
    let mut primal = vec![0.0; layout.n_vars];
    for s in layout.sides() {
        let w = s.weighting_only();
        let t = s.n_slices();
        let mut p = LpProblem::new(Sense::Maximize, 3 * t);
        add_weighting_rows(&mut p, &w);
        for l in 0..t {
            if let Some(i) = s.slice_outcome[l] {
                p.objective[w.psi(l)] = s.widths[l] * best[i];
            }
        }
        let sol = solver.solve(&p);
        require_optimal(&sol, x)?;
        h += sol.objective;
        for l in 0..t {
            let psi = sol.x[w.psi(l)];
            primal[s.psi(l)] = psi;
            primal[s.eta(l)] = sol.x[w.eta(l)];
            primal[s.theta(l)] = sol.x[w.theta(l)];
            let a = s.slice_outcome[l].and_then(|i| slopes[i]).unwrap_or(fallback);
            let b = space.intercepts(a);
            for j in 0..space.n_pieces() {
                primal[s.a(l, j)] = psi * (a[j] - EPS_POS).max(0.0);
                primal[s.b(l, j)] = psi * b[j];
            }
        }
    }
    Ok(Decomposed { layout, h, primal })
}
