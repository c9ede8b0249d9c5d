//! Piecewise-linear value and weighting functions, closed-form reference
//! functions, distances between weightings, and the rank-dependent expected
//! value of a shifted prospect.

pub mod reference;
mod value;
mod weighting;

pub use value::{piece_index, PLValueFunction, DOMAIN_TOL, EPS_POS, SHAPE_TOL};
pub use weighting::{pseudo_metric_general, pseudo_metric_l1, pseudo_metric_with, union_grid, Envelope, PLWeighting, ShapeCheck, NORMALIZATION_TOL};

use crate::numeric::compensated_sum;
use crate::prospect::{pi_weights, Prospect};
use crate::Result;

/// `Σ_i π_i v(ξ_i - x)` with decision weights from `w_minus` on losses and
/// `w_plus` on gains.
pub fn distorted_expectation(v: &PLValueFunction, w_minus: &PLWeighting, w_plus: &PLWeighting, prospect: &Prospect, x: f64) -> Result<f64> {
    let split = prospect.sign_split(x);
    let pi = pi_weights(&split, prospect.probs(), w_minus, w_plus);
    let mut terms = Vec::with_capacity(pi.pi.len());
    for (p, &z) in pi.pi.iter().zip(&split.shifted) {
        terms.push(p * v.eval(z)?);
    }
    Ok(compensated_sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_returns_value_at_shift() {
        let v = PLValueFunction::interpolate(reference::true_value, &[-0.5, -0.1, 0.0, 0.2, 0.5]).unwrap();
        let w = crate::benchmark::nominal_weighting();
        let p = Prospect::degenerate(0.3);
        let got = distorted_expectation(&v, &w, &w, &p, 0.1).unwrap();
        assert!((got - v.eval(0.2).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn identity_weights_give_mean() {
        let v = PLValueFunction::linear(-1.0, 1.0).unwrap();
        let id = PLWeighting::identity();
        let p = Prospect::uniform(&[0.0, 1.0]).unwrap();
        assert!((distorted_expectation(&v, &id, &id, &p, 0.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn benchmark_root_is_near_zero() {
        let p = crate::benchmark::benchmark_prospect();
        let w = crate::benchmark::nominal_weighting();
        let grid: Vec<f64> = p.support().iter().map(|xi| xi - 0.2044).chain([-0.5, 0.0, 0.5]).collect();
        let mut grid = grid;
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let v = PLValueFunction::interpolate(reference::true_value, &grid).unwrap();
        let e = distorted_expectation(&v, &w, &w, &p, 0.2044).unwrap();
        assert!(e.abs() < 1e-3, "{e}");
    }

    #[test]
    fn outcome_at_reference_point_is_harmless() {
        let v = PLValueFunction::linear(-1.0, 1.0).unwrap();
        let w = crate::benchmark::nominal_weighting();
        let p = Prospect::uniform(&[0.2, 0.4]).unwrap();
        // The outcome equal to x lands in the gain block with value zero.
        let at = distorted_expectation(&v, &w, &w, &p, 0.2).unwrap();
        let tail = w.eval(0.5).unwrap();
        assert!((at - tail * 0.2).abs() < 1e-15);
    }

    #[test]
    fn domain_escape_is_an_error() {
        let v = PLValueFunction::linear(-0.5, 0.5).unwrap();
        let id = PLWeighting::identity();
        let p = Prospect::uniform(&[0.0, 1.0]).unwrap();
        assert!(distorted_expectation(&v, &id, &id, &p, 0.0).is_err());
    }
}
