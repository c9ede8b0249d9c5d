//! Linear programs in row form and a dense two-phase simplex solver.
//!
//! `LpProblem` stores a linear objective, sparse labelled rows (`<=`, `=`,
//! `>=`) and per-variable bounds. Any type implementing [`LpSolver`] can
//! solve it; [`DenseSimplex`] is the bundled implementation.

mod problem;
mod simplex;
mod text;

pub use problem::{LpError, LpProblem, Row, RowKind, Sense};
pub use simplex::{DenseSimplex, LpSolution, LpSolver, LpStatus, SimplexOptions};
pub use text::{dump, parse, ParseError};

pub mod fixtures;
