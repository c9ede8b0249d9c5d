//! Generalized shortfall risk of a single (value, weighting) tuple: the
//! smallest cash amount `x` with `E[v(ξ - x)] <= level`.

use serde::{Deserialize, Serialize};

use crate::functions::{distorted_expectation, PLValueFunction, PLWeighting};
use crate::numeric::bisect_decreasing;
use crate::prospect::Prospect;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisectionConfig {
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for BisectionConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-8, max_iter: 200 }
    }
}

impl BisectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidConfig(format!("need abs_tol > 0 and max_iter >= 1, got {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GsrOutcome {
    pub rho: f64,
    pub iterations: usize,
}

/// Shortfall risk at acceptance level zero; see [`gsr_cpt_level`].
pub fn gsr_cpt(v: &PLValueFunction, w_minus: &PLWeighting, w_plus: &PLWeighting, prospect: &Prospect, cfg: &BisectionConfig) -> Result<GsrOutcome> {
    gsr_cpt_level(v, w_minus, w_plus, prospect, cfg, 0.0)
}

/// Root of the strictly decreasing map `x ↦ E[v(ξ - x)] - level`, searched
/// on `[min ξ, max ξ]` and returned as the midpoint of the final bracket.
///
/// At level zero the bracket is always valid: every shifted outcome is
/// non-negative at the left end and non-positive at the right end. Other
/// levels must keep the root inside the same bracket.
pub fn gsr_cpt_level(
    v: &PLValueFunction,
    w_minus: &PLWeighting,
    w_plus: &PLWeighting,
    prospect: &Prospect,
    cfg: &BisectionConfig,
    level: f64,
) -> Result<GsrOutcome> {
    cfg.validate()?;
    let f = |x: f64| distorted_expectation(v, w_minus, w_plus, prospect, x).map(|e| e - level);
    bisect_in_support(f, prospect, cfg, level != 0.0)
}

/// Bisection on the support bracket of `prospect`, returning the midpoint.
pub(crate) fn bisect_in_support(f: impl FnMut(f64) -> Result<f64>, prospect: &Prospect, cfg: &BisectionConfig, check_bracket: bool) -> Result<GsrOutcome> {
    let mut f = f;
    let (lo, hi) = (prospect.min(), prospect.max());
    if check_bracket {
        let (a, b) = (f(lo)?, f(hi)?);
        if a < 0.0 || b > 0.0 {
            return Err(Error::BracketViolation { at_lower: a, at_upper: b });
        }
    }
    let (lo, hi, iterations) = bisect_decreasing(&mut f, lo, hi, cfg.abs_tol, cfg.max_iter)?;
    Ok(GsrOutcome { rho: 0.5 * (lo + hi), iterations })
}

/// `(ρ(ξ + c), ρ(ξ) + c)`, equal up to the bisection tolerance.
pub fn gsr_translation_check(
    v: &PLValueFunction,
    w_minus: &PLWeighting,
    w_plus: &PLWeighting,
    prospect: &Prospect,
    c: f64,
    cfg: &BisectionConfig,
) -> Result<(f64, f64)> {
    let shifted = gsr_cpt(v, w_minus, w_plus, &prospect.shifted(c), cfg)?.rho;
    let base = gsr_cpt(v, w_minus, w_plus, prospect, cfg)?.rho;
    Ok((shifted, base + c))
}
