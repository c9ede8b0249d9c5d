use crate::functions::{PLValueFunction, PLWeighting, EPS_POS};
use crate::{Error, Result};

use super::layout::{Layout, SideLayout};
use super::WorstCaseTuple;

/// Relative tolerance accepted on continuity and shape of recovered functions.
pub const EXTRACTION_TOL: f64 = 1e-6;

fn weighting(s: &SideLayout, primal: &[f64]) -> Result<PLWeighting> {
    let psi: Vec<f64> = (0..s.n_slices()).map(|l| primal[s.psi(l)].max(EPS_POS)).collect();
    let total: f64 = psi.iter().zip(&s.widths).map(|(p, d)| p * d).sum();
    let slopes = psi.iter().map(|p| p / total).collect();
    PLWeighting::with_tolerance(s.t.clone(), slopes, s.p_star_index, EXTRACTION_TOL)
}

/// Recovers `(v, w⁻, w⁺)` from a primal vector of the full program.
///
/// The value function is the slice copy `(ã, b̃) / ψ` of the slice with the
/// largest `ψ` among those carrying objective mass. A side without outcomes
/// keeps its ball center.
pub fn extract_worst_case(layout: &Layout, primal: &[f64]) -> Result<WorstCaseTuple> {
    let mut pick: Option<(&SideLayout, usize, f64)> = None;
    for s in layout.sides() {
        for l in 0..s.n_slices() {
            let psi = primal[s.psi(l)];
            if s.slice_outcome[l].is_some() && pick.map_or(true, |(_, _, best)| psi > best) {
                pick = Some((s, l, psi));
            }
        }
    }
    if pick.is_none() {
        for s in layout.sides() {
            for l in 0..s.n_slices() {
                let psi = primal[s.psi(l)];
                if pick.map_or(true, |(_, _, best)| psi > best) {
                    pick = Some((s, l, psi));
                }
            }
        }
    }
    let (s, l, psi) = pick.ok_or(Error::ExtractionDegenerate)?;
    if psi < 2.0 * EPS_POS {
        return Err(Error::ExtractionDegenerate);
    }
    let pieces = layout.grid.n_pieces();
    let a: Vec<f64> = (0..pieces).map(|j| s.slope(primal, l, j) / psi).collect();
    let b: Vec<f64> = (0..pieces).map(|j| primal[s.b(l, j)] / psi).collect();
    let value = PLValueFunction::with_tolerance(layout.grid.points().to_vec(), a, b, EXTRACTION_TOL)?;
    let w_minus = match &layout.minus {
        Some(s) => weighting(s, primal)?,
        None => layout.center_minus.clone(),
    };
    let w_plus = match &layout.plus {
        Some(s) => weighting(s, primal)?,
        None => layout.center_plus.clone(),
    };
    Ok(WorstCaseTuple { value, w_minus, w_plus })
}
