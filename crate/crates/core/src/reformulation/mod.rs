//! The worst-case expected value
//! `h(x) = sup { E_{w⁻,w⁺}[v(ξ - x)] : v, w⁻, w⁺ admissible }`
//! as a linear program, and recovery of a maximizing tuple.
//!
//! Two evaluation paths produce the same optimum. [`Method::FullLp`] solves
//! the single program over scaled slice copies `(ψ_l a, ψ_l b)` assembled by
//! [`assemble`]. [`Method::Decomposed`] uses that each slice copy lives in a
//! positive multiple of one value polytope and solves many small programs
//! instead; it also returns a primal vector in the full layout so the two
//! are interchangeable downstream.

mod assemble;
mod decomposed;
mod extract;
mod layout;
mod value_space;

pub use assemble::{assemble, LinearizedWorstCaseLP, RowFamily};
pub use extract::{extract_worst_case, EXTRACTION_TOL};
pub use layout::{refine_for_prospect, Layout, Side, SideLayout, WEIGHT_GRID_TOL};
pub use value_space::ValueSpace;

use prgsr_lp::{DenseSimplex, LpSolver};
use serde::{Deserialize, Serialize};

use crate::ambiguity::AmbiguityModel;
use crate::functions::{distorted_expectation, PLValueFunction, PLWeighting};
use crate::prospect::{pi_weights, Prospect};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FullLp,
    #[default]
    Decomposed,
}

/// A value function and the two weightings attaining the worst case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseTuple {
    pub value: PLValueFunction,
    pub w_minus: PLWeighting,
    pub w_plus: PLWeighting,
}

impl WorstCaseTuple {
    pub fn expectation(&self, prospect: &Prospect, x: f64) -> Result<f64> {
        distorted_expectation(&self.value, &self.w_minus, &self.w_plus, prospect, x)
    }
}

/// The optimum of the worst-case program at one `x`.
#[derive(Debug, Clone)]
pub struct WorstCaseEvaluation {
    pub x: f64,
    pub h: f64,
    /// Primal vector in the full program's variable layout.
    pub primal: Vec<f64>,
    pub layout: Layout,
}

impl WorstCaseEvaluation {
    pub fn worst_case(&self) -> Result<WorstCaseTuple> {
        extract_worst_case(&self.layout, &self.primal)
    }

    /// `h(x)` minus the expected value of the recovered tuple. Zero when the
    /// slices agree on one value function; positive otherwise.
    pub fn slice_gap(&self, prospect: &Prospect) -> Result<f64> {
        Ok(self.h - self.worst_case()?.expectation(prospect, self.x)?)
    }

    /// The recovered weightings paired with the admissible value function
    /// that maximizes the expectation under them.
    ///
    /// A slice only constrains its value function at its own outcome, so the
    /// divided slice copy can be far from optimal elsewhere. Re-optimizing
    /// the value function against fixed weightings is one linear program and
    /// yields an admissible tuple whose expectation is at least that of
    /// [`WorstCaseEvaluation::worst_case`].
    pub fn consistent_case(&self, model: &AmbiguityModel, prospect: &Prospect, solver: &dyn LpSolver) -> Result<WorstCaseTuple> {
        let sliced = self.worst_case()?;
        let space = ValueSpace::new(model, self.layout.grid.clone())?;
        let split = prospect.sign_split(self.x);
        let pi = pi_weights(&split, prospect.probs(), &sliced.w_minus, &sliced.w_plus);
        let mut problem = space.problem.clone();
        problem.objective = vec![0.0; space.n_pieces()];
        for (&z, &w) in split.shifted.iter().zip(&pi.pi) {
            for (o, c) in problem.objective.iter_mut().zip(space.value_coeffs(z)) {
                *o += w * c;
            }
        }
        let sol = solver.solve(&problem);
        if !sol.is_optimal() {
            return Err(decomposed::status_error(sol.status, self.x));
        }
        let value = space.function(&sol.x, EXTRACTION_TOL)?;
        let tuple = WorstCaseTuple { value, w_minus: sliced.w_minus.clone(), w_plus: sliced.w_plus.clone() };
        if tuple.expectation(prospect, self.x)? >= sliced.expectation(prospect, self.x)? {
            Ok(tuple)
        } else {
            Ok(sliced)
        }
    }

    /// `h(x)` minus the expectation of [`WorstCaseEvaluation::consistent_case`].
    pub fn consistent_gap(&self, model: &AmbiguityModel, prospect: &Prospect, solver: &dyn LpSolver) -> Result<f64> {
        Ok(self.h - self.consistent_case(model, prospect, solver)?.expectation(prospect, self.x)?)
    }
}

pub fn evaluate(model: &AmbiguityModel, prospect: &Prospect, x: f64, method: Method, solver: &dyn LpSolver) -> Result<WorstCaseEvaluation> {
    match method {
        Method::FullLp => {
            let lp = assemble(model, prospect, x)?;
            let sol = solver.solve(&lp.problem);
            if !sol.is_optimal() {
                return Err(decomposed::status_error(sol.status, x));
            }
            Ok(WorstCaseEvaluation { x, h: sol.objective, primal: sol.x, layout: lp.layout })
        }
        Method::Decomposed => {
            let d = decomposed::solve(model, prospect, x, solver)?;
            Ok(WorstCaseEvaluation { x, h: d.h, primal: d.primal, layout: d.layout })
        }
    }
}

/// `h(x)` by the default method and the embedded simplex.
pub fn h_of_x(model: &AmbiguityModel, prospect: &Prospect, x: f64) -> Result<f64> {
    Ok(evaluate(model, prospect, x, Method::default(), &DenseSimplex::default())?.h)
}
