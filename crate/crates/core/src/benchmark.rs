//! The reference instance: ten equally likely outcomes, value domain
//! `[-0.5, 0.5]`, and nominal weightings interpolated on a 0.1 grid.

use crate::ambiguity::{pinning_records, AmbiguityModel, ValueDomain, WeightingBall};
use crate::functions::reference::{cpt_weighting, ReferenceFunctions};
use crate::functions::{Envelope, PLValueFunction, PLWeighting, ShapeCheck};
use crate::prospect::Prospect;
use crate::Result;

pub const BENCHMARK_OUTCOMES: [f64; 10] = [0.4074, 0.4529, 0.0635, 0.4567, 0.3162, 0.0488, 0.1392, 0.2734, 0.4788, 0.4824];

/// Curvature of the reference weighting.
pub const GAMMA: f64 = 0.6;

pub fn benchmark_prospect() -> Prospect {
    Prospect::uniform(&BENCHMARK_OUTCOMES).expect("valid benchmark prospect")
}

/// `{0, 0.1, ..., 1}`.
pub fn tenth_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// Interpolation of the reference weighting on [`tenth_grid`].
pub fn nominal_weighting() -> PLWeighting {
    PLWeighting::interpolate(|p| cpt_weighting(p, GAMMA), &tenth_grid(), ShapeCheck::Enforce).expect("reference weighting is inverse-S")
}

/// `[-0.5, 0.5]` with endpoint values taken from the reference value function.
pub fn benchmark_domain() -> ValueDomain {
    let f = ReferenceFunctions::default();
    ValueDomain::new(-0.5, 0.5, f.value(-0.5), f.value(0.5)).expect("valid domain")
}

/// Reference value function interpolated on `breakpoints`.
pub fn discretized_truth(breakpoints: &[f64]) -> Result<PLValueFunction> {
    let f = ReferenceFunctions::default();
    PLValueFunction::interpolate(|y| f.value(y), breakpoints)
}

/// Model without elicited records: shape rules, domain anchors, and balls of
/// the given radius around the nominal weighting on both sides.
pub fn empty_model(radius: f64) -> AmbiguityModel {
    let w = nominal_weighting();
    let ball = WeightingBall::new(w.clone(), radius, Envelope::default()).expect("valid ball");
    AmbiguityModel::new(Vec::new(), Vec::new(), (w.clone(), w), benchmark_domain(), ball.clone(), ball).expect("valid model")
}

/// Model whose only admissible value function is `v` and whose balls have
/// the given center and radius on both sides.
pub fn pinned_model(v: &PLValueFunction, center: &PLWeighting, radius: f64) -> Result<AmbiguityModel> {
    let domain = ValueDomain::new(v.lower(), v.upper(), v.left_value(), v.right_value())?;
    let ball = WeightingBall::new(center.clone(), radius, Envelope::default())?;
    AmbiguityModel::new(pinning_records(v)?, Vec::new(), (center.clone(), center.clone()), domain, ball.clone(), ball)
}
