//! Shortfall risk against the worst case of an ambiguity set: the smallest
//! `x` with `h(x) <= 0`, plus the evaluator for finite preference sets.

use prgsr_lp::{DenseSimplex, LpSolver};
use serde::{Deserialize, Serialize};

use crate::ambiguity::AmbiguityModel;
use crate::functions::distorted_expectation;
use crate::gsr::{bisect_in_support, gsr_cpt, BisectionConfig};
use crate::numeric::bisect_decreasing;
use crate::prospect::Prospect;
use crate::reformulation::{evaluate, Method, WorstCaseEvaluation, WorstCaseTuple};
use crate::{Error, Result};

/// Slack allowed on the signs of `h` at the ends of the support bracket.
pub const BRACKET_SIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RobustConfig {
    pub bisection: BisectionConfig,
    pub method: Method,
    /// Number of evenly spaced `(x, h(x))` samples to report; zero skips it.
    pub h_curve_points: usize,
}

impl Default for RobustConfig {
    fn default() -> Self {
        Self { bisection: BisectionConfig::default(), method: Method::default(), h_curve_points: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobustOutcome {
    pub rho: f64,
    pub iterations: usize,
    /// `h` at the returned level.
    pub h_at_rho: f64,
    /// The tuple divided out of the largest weight slice.
    pub worst_case: WorstCaseTuple,
    /// `h(rho)` minus the expectation of `worst_case`.
    pub slice_gap: f64,
    /// The recovered weightings with the value function re-optimized
    /// against them.
    pub consistent_case: WorstCaseTuple,
    /// `h(rho)` minus the expectation of `consistent_case`.
    pub consistent_gap: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_curve: Option<Vec<(f64, f64)>>,
}

/// [`prgsr_with`] using the embedded simplex.
pub fn prgsr(model: &AmbiguityModel, prospect: &Prospect, cfg: &RobustConfig) -> Result<RobustOutcome> {
    prgsr_with(model, prospect, cfg, &DenseSimplex::default())
}

/// Bisection on `h` over `[min ξ, max ξ]`.
///
/// The returned level is the upper end of the final bracket, so `h(rho)` is
/// non-positive up to solver tolerance. The worst-case tuple is the one
/// attaining `h(rho)`.
pub fn prgsr_with(model: &AmbiguityModel, prospect: &Prospect, cfg: &RobustConfig, solver: &dyn LpSolver) -> Result<RobustOutcome> {
    cfg.bisection.validate()?;
    let h = |x: f64| evaluate(model, prospect, x, cfg.method, solver);
    let (lo, hi) = (prospect.min(), prospect.max());
    let at_hi = h(hi)?;
    let (rho, iterations, at_rho) = if lo == hi {
        (hi, 0, at_hi)
    } else {
        let at_lo = h(lo)?.h;
        if at_lo < -BRACKET_SIGN_TOL || at_hi.h > BRACKET_SIGN_TOL {
            return Err(Error::BracketViolation { at_lower: at_lo, at_upper: at_hi.h });
        }
        let mut upper: Option<WorstCaseEvaluation> = Some(at_hi);
        let (_, right, iterations) = bisect_decreasing(
            |x| {
                let ev = h(x)?;
                let value = ev.h;
                if value <= 0.0 {
                    upper = Some(ev);
                }
                Ok::<f64, Error>(value)
            },
            lo,
            hi,
            cfg.bisection.abs_tol,
            cfg.bisection.max_iter,
        )?;
        let at_rho = match upper {
            Some(ev) if ev.x == right => ev,
            _ => h(right)?,
        };
        (right, iterations, at_rho)
    };
    let worst_case = at_rho.worst_case()?;
    let slice_gap = at_rho.h - worst_case.expectation(prospect, rho)?;
    let consistent_case = at_rho.consistent_case(model, prospect, solver)?;
    let consistent_gap = at_rho.h - consistent_case.expectation(prospect, rho)?;
    let h_curve = if cfg.h_curve_points > 0 { Some(h_curve_with(model, prospect, cfg.h_curve_points, cfg.method, solver)?) } else { None };
    Ok(RobustOutcome { rho, iterations, h_at_rho: at_rho.h, worst_case, slice_gap, consistent_case, consistent_gap, h_curve })
}

/// `n` evenly spaced samples of `h` over `[min ξ, max ξ]`.
pub fn h_curve_with(model: &AmbiguityModel, prospect: &Prospect, n: usize, method: Method, solver: &dyn LpSolver) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = (prospect.min(), prospect.max());
    (0..n)
        .map(|k| {
            let x = if n == 1 { lo } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 };
            Ok((x, evaluate(model, prospect, x, method, solver)?.h))
        })
        .collect()
}

/// Largest single-tuple shortfall risk over a finite preference set.
pub fn worst_gsr_finite(tuples: &[WorstCaseTuple], prospect: &Prospect, cfg: &BisectionConfig) -> Result<f64> {
    if tuples.is_empty() {
        return Err(Error::InvalidConfig("empty preference set".into()));
    }
    let mut worst = f64::NEG_INFINITY;
    for t in tuples {
        worst = worst.max(gsr_cpt(&t.value, &t.w_minus, &t.w_plus, prospect, cfg)?.rho);
    }
    Ok(worst)
}

/// Root of `x ↦ max_t E_t[v_t(ξ - x)]` by bisection on the support
/// bracket, returned as the bracket midpoint like [`gsr_cpt`].
pub fn robust_constraint_root(tuples: &[WorstCaseTuple], prospect: &Prospect, cfg: &BisectionConfig) -> Result<f64> {
    if tuples.is_empty() {
        return Err(Error::InvalidConfig("empty preference set".into()));
    }
    cfg.validate()?;
    let f = |x: f64| {
        let mut worst = f64::NEG_INFINITY;
        for t in tuples {
            worst = worst.max(distorted_expectation(&t.value, &t.w_minus, &t.w_plus, prospect, x)?);
        }
        Ok(worst)
    };
    Ok(bisect_in_support(f, prospect, cfg, false)?.rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::{benchmark_prospect, discretized_truth, nominal_weighting, pinned_model};
    use crate::functions::reference::ReferenceFunctions;
    use crate::functions::PLValueFunction;

    fn grid() -> Vec<f64> {
        (0..=20).map(|k| -0.5 + k as f64 / 20.0).collect()
    }

    fn truth_tuple() -> WorstCaseTuple {
        let w = nominal_weighting();
        WorstCaseTuple { value: discretized_truth(&grid()).unwrap(), w_minus: w.clone(), w_plus: w }
    }

    #[test]
    fn pinned_singleton_matches_single_tuple_risk() {
        let t = truth_tuple();
        let xi = benchmark_prospect();
        let model = pinned_model(&t.value, &t.w_minus, 0.0).unwrap();
        let cfg = RobustConfig::default();
        let out = prgsr(&model, &xi, &cfg).unwrap();
        let single = gsr_cpt(&t.value, &t.w_minus, &t.w_plus, &xi, &cfg.bisection).unwrap().rho;
        assert!((out.rho - single).abs() <= 2.0 * cfg.bisection.abs_tol, "{} vs {single}", out.rho);
        assert!(out.h_at_rho <= BRACKET_SIGN_TOL);
        assert!(out.consistent_gap.abs() <= 1e-8);
    }

    #[test]
    fn h_curve_is_sampled_on_request() {
        let t = truth_tuple();
        let model = pinned_model(&t.value, &t.w_minus, 0.0).unwrap();
        let xi = benchmark_prospect();
        let out = prgsr(&model, &xi, &RobustConfig { h_curve_points: 5, ..RobustConfig::default() }).unwrap();
        let curve = out.h_curve.unwrap();
        assert_eq!(curve.len(), 5);
        assert_eq!(curve[0].0, xi.min());
        assert_eq!(curve[4].0, xi.max());
        assert!(curve.windows(2).all(|w| w[0].1 > w[1].1));
    }

    #[test]
    fn single_tuple_set_equals_its_risk() {
        let t = truth_tuple();
        let xi = benchmark_prospect();
        let cfg = BisectionConfig::default();
        let rho = gsr_cpt(&t.value, &t.w_minus, &t.w_plus, &xi, &cfg).unwrap().rho;
        assert_eq!(worst_gsr_finite(std::slice::from_ref(&t), &xi, &cfg).unwrap(), rho);
        assert!((robust_constraint_root(std::slice::from_ref(&t), &xi, &cfg).unwrap() - rho).abs() <= 2.0 * cfg.abs_tol);
    }

    #[test]
    fn pointwise_larger_value_function_dominates() {
        let t = truth_tuple();
        // Milder losses raise the expectation at every level, so the root moves right.
        let milder = ReferenceFunctions { loss_aversion: 1.0, ..ReferenceFunctions::default() };
        let variant = WorstCaseTuple { value: PLValueFunction::interpolate(|y| milder.value(y), &grid()).unwrap(), ..t.clone() };
        let xi = benchmark_prospect();
        let cfg = BisectionConfig::default();
        let own = gsr_cpt(&variant.value, &variant.w_minus, &variant.w_plus, &xi, &cfg).unwrap().rho;
        let base = gsr_cpt(&t.value, &t.w_minus, &t.w_plus, &xi, &cfg).unwrap().rho;
        assert!(own > base);
        let set = [t, variant];
        assert_eq!(worst_gsr_finite(&set, &xi, &cfg).unwrap(), own);
        assert!((robust_constraint_root(&set, &xi, &cfg).unwrap() - own).abs() <= 2.0 * cfg.abs_tol);
    }

    #[test]
    fn empty_set_is_rejected() {
        let cfg = BisectionConfig::default();
        assert!(worst_gsr_finite(&[], &benchmark_prospect(), &cfg).is_err());
        assert!(robust_constraint_root(&[], &benchmark_prospect(), &cfg).is_err());
    }
}
