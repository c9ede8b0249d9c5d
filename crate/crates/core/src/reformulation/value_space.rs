use prgsr_lp::{LpProblem, RowKind, Sense};

use crate::ambiguity::{ce_constraint_coeffs, phi_integrals, AmbiguityModel, BreakpointGrid, CeBound, LinearForm};
use crate::functions::{PLValueFunction, EPS_POS};
use crate::Result;

/// Feasible piecewise-linear value functions on a grid, parameterized by
/// their slopes alone.
///
/// With `v(0) = 0` every node value is a signed partial sum of `a_j Δ_j`
/// outward from zero, so `v(z)` for any grid point is linear in the slopes
/// and the domain anchors become two equality rows.
#[derive(Debug, Clone)]
pub struct ValueSpace {
    pub grid: BreakpointGrid,
    pub problem: LpProblem,
    widths: Vec<f64>,
}

impl ValueSpace {
    pub fn new(model: &AmbiguityModel, grid: BreakpointGrid) -> Result<Self> {
        let pieces = grid.n_pieces();
        let j0 = grid.zero_index();
        let widths = grid.widths();
        let mut p = LpProblem::new(Sense::Maximize, pieces);
        for j in 0..pieces {
            p.set_bounds(j, EPS_POS, f64::INFINITY);
        }
        p.add_row("anchor_left", (0..j0).map(|j| (j, widths[j])), RowKind::Eq, -model.domain.left_value);
        p.add_row("anchor_right", (j0..pieces).map(|j| (j, widths[j])), RowKind::Eq, model.domain.right_value);
        for j in 0..pieces.saturating_sub(1) {
            if j + 1 < j0 {
                p.add_row("convex_losses", [(j, 1.0), (j + 1, -1.0)], RowKind::Le, 0.0);
            } else if j >= j0 {
                p.add_row("concave_gains", [(j + 1, 1.0), (j, -1.0)], RowKind::Le, 0.0);
            }
        }
        let mut space = Self { grid, problem: p, widths };
        for rec in &model.pairwise {
            let phi = phi_integrals(rec, &space.grid)?;
            space.problem.add_row("pairwise", phi.into_iter().enumerate(), RowKind::Le, 0.0);
        }
        for rec in &model.ce {
            for (which, kind, name) in [(CeBound::Upper, RowKind::Le, "ce_upper"), (CeBound::Lower, RowKind::Ge, "ce_lower")] {
                let form = ce_constraint_coeffs(rec, &space.grid, &model.ce_weightings, which)?;
                let coeffs = space.slope_form(&form);
                space.problem.add_row(name, coeffs.into_iter().enumerate(), kind, 0.0);
            }
        }
        Ok(space)
    }

    pub fn n_pieces(&self) -> usize {
        self.widths.len()
    }

    /// Coefficients of `v(y_k)` in the slopes.
    pub fn node_coeffs(&self, k: usize, out: &mut [f64]) {
        let j0 = self.grid.zero_index();
        if k >= j0 {
            for j in j0..k {
                out[j] += self.widths[j];
            }
        } else {
            for j in k..j0 {
                out[j] -= self.widths[j];
            }
        }
    }

    /// Coefficients of `v(z)` in the slopes, using the piece that owns `z`.
    pub fn value_coeffs(&self, z: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.n_pieces()];
        self.value_coeffs_into(z, 1.0, &mut out);
        out
    }

    fn value_coeffs_into(&self, z: f64, scale: f64, out: &mut [f64]) {
        let j = self.grid.piece_of(z);
        let y = self.grid.points();
        let mut tmp = vec![0.0; self.n_pieces()];
        self.node_coeffs(j, &mut tmp);
        tmp[j] += z - y[j];
        for (o, t) in out.iter_mut().zip(tmp) {
            *o += scale * t;
        }
    }

    /// Rewrites a form in `(a_j, b_j)` through `b_j = v(y_j) - a_j y_j`.
    pub fn slope_form(&self, form: &LinearForm) -> Vec<f64> {
        let y = self.grid.points();
        let mut out = form.slope_coeffs.clone();
        for (j, &c) in form.intercept_coeffs.iter().enumerate() {
            if c != 0.0 {
                let mut node = vec![0.0; self.n_pieces()];
                self.node_coeffs(j, &mut node);
                node[j] -= y[j];
                for (o, n) in out.iter_mut().zip(node) {
                    *o += c * n;
                }
            }
        }
        out
    }

    /// Intercepts `b_j = v(y_j) - a_j y_j` for given slopes.
    pub fn intercepts(&self, slopes: &[f64]) -> Vec<f64> {
        let y = self.grid.points();
        let j0 = self.grid.zero_index();
        let mut nodes = vec![0.0; y.len()];
        for k in j0 + 1..y.len() {
            nodes[k] = nodes[k - 1] + slopes[k - 1] * self.widths[k - 1];
        }
        for k in (0..j0).rev() {
            nodes[k] = nodes[k + 1] - slopes[k] * self.widths[k];
        }
        (0..self.n_pieces()).map(|j| nodes[j] - slopes[j] * y[j]).collect()
    }

    /// The value function with the given slopes; `tol` bounds the relative
    /// violation of continuity and shape accepted.
    pub fn function(&self, slopes: &[f64], tol: f64) -> Result<PLValueFunction> {
        PLValueFunction::with_tolerance(self.grid.points().to_vec(), slopes.to_vec(), self.intercepts(slopes), tol)
    }
}
