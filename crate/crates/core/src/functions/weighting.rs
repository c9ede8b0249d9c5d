use serde::{Deserialize, Serialize};

use crate::numeric::{compensated_sum, gauss_legendre, CompensatedSum};
use crate::{Error, Result};

use super::value::SHAPE_TOL;

/// Whether construction rejects weightings that are not inverse-S shaped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeCheck {
    Enforce,
    Skip,
}

/// Continuous increasing piecewise-linear map of `[0, 1]` onto itself.
///
/// `slopes[l]` is the derivative on `[t_l, t_{l+1})`. `p_star_index` names
/// the breakpoint where an inverse-S weighting turns from concave to convex:
/// slopes do not increase on pieces before it and do not decrease from it
/// onwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeighting", into = "RawWeighting")]
pub struct PLWeighting {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    p_star_index: usize,
    nodes: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawWeighting {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    p_star_index: usize,
}

impl TryFrom<RawWeighting> for PLWeighting {
    type Error = Error;
    fn try_from(raw: RawWeighting) -> Result<Self> {
        Self::new(raw.breakpoints, raw.slopes, raw.p_star_index)
    }
}

impl From<PLWeighting> for RawWeighting {
    fn from(w: PLWeighting) -> Self {
        Self { breakpoints: w.breakpoints, slopes: w.slopes, p_star_index: w.p_star_index }
    }
}

/// Tolerance on `Σ ψ_l Δt_l = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-9;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidFunction(msg.into())
}

impl PLWeighting {
    /// Validated inverse-S weighting with the given inflection breakpoint.
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, p_star_index: usize) -> Result<Self> {
        let w = Self::build(breakpoints, slopes, p_star_index)?;
        if !w.is_inverse_s(SHAPE_TOL) {
            return Err(invalid(format!("slopes are not inverse-S around breakpoint {p_star_index}")));
        }
        Ok(w)
    }

    /// Like [`PLWeighting::new`] with a caller-chosen relative tolerance on
    /// the slope ordering.
    pub fn with_tolerance(breakpoints: Vec<f64>, slopes: Vec<f64>, p_star_index: usize, shape_tol: f64) -> Result<Self> {
        let w = Self::build(breakpoints, slopes, p_star_index)?;
        if !w.is_inverse_s(shape_tol) {
            return Err(invalid(format!("slopes are not inverse-S around breakpoint {p_star_index}")));
        }
        Ok(w)
    }

    /// Validated increasing weighting without a shape requirement; the
    /// inflection index is inferred when the slopes allow one and is zero
    /// otherwise.
    pub fn new_increasing(breakpoints: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        let mut w = Self::build(breakpoints, slopes, 0)?;
        w.p_star_index = w.infer_p_star(None).unwrap_or(0);
        Ok(w)
    }

    fn build(breakpoints: Vec<f64>, slopes: Vec<f64>, p_star_index: usize) -> Result<Self> {
        let t = &breakpoints;
        if t.len() < 2 || slopes.len() != t.len() - 1 {
            return Err(invalid(format!("{} breakpoints need {} slopes, got {}", t.len(), t.len().saturating_sub(1), slopes.len())));
        }
        if t[0] != 0.0 || *t.last().expect("len >= 2") != 1.0 {
            return Err(invalid("breakpoints must run from 0 to 1"));
        }
        if t.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("breakpoints must be strictly increasing"));
        }
        if slopes.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return Err(invalid("slopes must be positive and finite"));
        }
        if p_star_index > slopes.len() {
            return Err(invalid(format!("inflection index {p_star_index} exceeds piece count {}", slopes.len())));
        }
        let mut acc = CompensatedSum::default();
        let mut nodes = Vec::with_capacity(t.len());
        nodes.push(0.0);
        for l in 0..slopes.len() {
            acc.add(slopes[l] * (t[l + 1] - t[l]));
            nodes.push(acc.value());
        }
        let total = *nodes.last().expect("non-empty");
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(invalid(format!("slopes integrate to {total}, not 1")));
        }
        Ok(Self { breakpoints, slopes, p_star_index, nodes })
    }

    /// `w(p) = p`.
    pub fn identity() -> Self {
        Self::new(vec![0.0, 1.0], vec![1.0], 0).expect("identity is valid")
    }

    /// Interpolates `f` at `grid`, inferring the inflection breakpoint.
    pub fn interpolate(f: impl Fn(f64) -> f64, grid: &[f64], check: ShapeCheck) -> Result<Self> {
        Self::interpolate_inner(&f, grid, None, check)
    }

    /// Interpolates `f` at `grid` with the inflection placed at the breakpoint
    /// nearest `p_star` among those the slopes allow.
    pub fn interpolate_with_inflection(f: impl Fn(f64) -> f64, grid: &[f64], p_star: f64, check: ShapeCheck) -> Result<Self> {
        Self::interpolate_inner(&f, grid, Some(p_star), check)
    }

    fn interpolate_inner(f: &dyn Fn(f64) -> f64, grid: &[f64], p_star: Option<f64>, check: ShapeCheck) -> Result<Self> {
        let values: Vec<f64> = grid
            .iter()
            .map(|&t| {
                if t == 0.0 {
                    0.0
                } else if t == 1.0 {
                    1.0
                } else {
                    f(t)
                }
            })
            .collect();
        let slopes: Vec<f64> = (0..grid.len().saturating_sub(1)).map(|l| (values[l + 1] - values[l]) / (grid[l + 1] - grid[l])).collect();
        let mut w = Self::build(grid.to_vec(), slopes, 0)?;
        match (w.infer_p_star(p_star), check) {
            (Some(k), _) => w.p_star_index = k,
            (None, ShapeCheck::Skip) => w.p_star_index = 0,
            (None, ShapeCheck::Enforce) => return Err(invalid("interpolated slopes are not inverse-S on this grid")),
        }
        Ok(w)
    }

    /// Among inflection indices consistent with the slopes, the one nearest
    /// `target`, or nearest the middle of the flattest pieces when no target
    /// is given.
    fn infer_p_star(&self, target: Option<f64>) -> Option<usize> {
        let t = &self.breakpoints;
        let s = &self.slopes;
        let n = s.len();
        let tol = SHAPE_TOL * s.iter().fold(0.0, |m: f64, &v| m.max(v));
        let valid: Vec<usize> = (0..=n).filter(|&k| shape_holds(s, k, tol)).collect();
        if valid.is_empty() {
            return None;
        }
        let target = target.unwrap_or_else(|| {
            let min = s.iter().copied().fold(f64::INFINITY, f64::min);
            let flat: Vec<f64> = (0..n).filter(|&l| s[l] <= min + tol).map(|l| 0.5 * (t[l] + t[l + 1])).collect();
            flat.iter().sum::<f64>() / flat.len() as f64
        });
        valid.into_iter().min_by(|&a, &b| (t[a] - target).abs().total_cmp(&(t[b] - target).abs()))
    }

    pub fn is_inverse_s(&self, rel_tol: f64) -> bool {
        let tol = rel_tol * self.slopes.iter().fold(0.0, |m: f64, &v| m.max(v));
        shape_holds(&self.slopes, self.p_star_index, tol)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn p_star_index(&self) -> usize {
        self.p_star_index
    }

    pub fn p_star(&self) -> f64 {
        self.breakpoints[self.p_star_index]
    }

    pub fn n_pieces(&self) -> usize {
        self.slopes.len()
    }

    /// `w(t_k)` for every breakpoint.
    pub fn node_values(&self) -> &[f64] {
        &self.nodes
    }

    pub fn piece_widths(&self) -> Vec<f64> {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn eval(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfDomain { value: p, lower: 0.0, upper: 1.0 });
        }
        Ok(self.eval_clamped(p))
    }

    /// Evaluates at `p` clamped into `[0, 1]`; `w(1)` is exactly one.
    pub fn eval_clamped(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        if p >= 1.0 {
            return 1.0;
        }
        let k = self.breakpoints.partition_point(|&t| t <= p);
        let l = k.clamp(1, self.slopes.len()) - 1;
        self.nodes[l] + self.slopes[l] * (p - self.breakpoints[l])
    }

    /// Same function on a refinement of the current grid.
    pub fn regrid(&self, grid: &[f64]) -> Result<Self> {
        let t = &self.breakpoints;
        for &old in t {
            if !grid.iter().any(|&g| g == old) {
                return Err(invalid(format!("grid does not refine the breakpoint {old}")));
            }
        }
        if grid.first() != Some(&0.0) || grid.last() != Some(&1.0) || grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("refined grid must increase strictly from 0 to 1"));
        }
        let slopes: Vec<f64> = grid
            .windows(2)
            .map(|w| {
                let k = t.partition_point(|&b| b <= w[0]);
                self.slopes[k.clamp(1, self.slopes.len()) - 1]
            })
            .collect();
        let p_star = self.p_star();
        let p_star_index = grid.iter().position(|&g| g == p_star).expect("refinement keeps breakpoints");
        let mut w = Self::build(grid.to_vec(), slopes, p_star_index)?;
        w.p_star_index = p_star_index;
        Ok(w)
    }
}

fn shape_holds(s: &[f64], k: usize, tol: f64) -> bool {
    let n = s.len();
    (0..n.saturating_sub(1)).all(|l| {
        if l + 1 < k {
            s[l + 1] <= s[l] + tol
        } else if l >= k {
            s[l] <= s[l + 1] + tol
        } else {
            true
        }
    })
}

/// Sorted union of two breakpoint grids.
pub fn union_grid(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = a.iter().chain(b).copied().collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Non-negative envelope bounding the test functions of the pseudo-metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Envelope {
    /// `g(t) = c`.
    Constant(f64),
    /// `g(t) = Σ c_k t^k`, coefficients from the constant term up.
    Polynomial(Vec<f64>),
}

impl Default for Envelope {
    fn default() -> Self {
        Envelope::Constant(1.0)
    }
}

impl Envelope {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Envelope::Constant(c) => *c,
            Envelope::Polynomial(coeffs) => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
        }
    }

    /// `∫_a^b g(t) dt`, exact for constants and by Gauss–Legendre otherwise.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        match self {
            Envelope::Constant(c) => {
                if !(c.is_finite() && *c >= 0.0) {
                    return Err(Error::InvalidEnvelope(format!("constant {c} must be finite and non-negative")));
                }
                Ok(c * (b - a))
            }
            Envelope::Polynomial(_) => integral_checked(&|t| self.eval(t), a, b),
        }
    }
}

fn integral_checked(g: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    let probe = [a, 0.5 * (a + b), b];
    if probe.iter().any(|&t| !(g(t).is_finite() && g(t) >= 0.0)) {
        return Err(Error::InvalidEnvelope(format!("envelope is negative or non-finite on [{a}, {b}]")));
    }
    let v = gauss_legendre(g, a, b);
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::InvalidEnvelope(format!("integral over [{a}, {b}] is {v}")));
    }
    Ok(v)
}

fn common_slopes(w1: &PLWeighting, w2: &PLWeighting) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let grid = union_grid(w1.breakpoints(), w2.breakpoints());
    let a = w1.regrid(&grid)?;
    let b = w2.regrid(&grid)?;
    Ok((grid, a.slopes, b.slopes))
}

/// `∫ |ψ₁ - ψ₂| dt` over `[0, 1]`, regridding to the union grid if needed.
pub fn pseudo_metric_l1(w1: &PLWeighting, w2: &PLWeighting) -> Result<f64> {
    pseudo_metric_general(w1, w2, &Envelope::Constant(1.0))
}

/// `sup_{|g| <= g̃} |∫ g (ψ₁ - ψ₂) dt| = Σ_l |ψ₁ - ψ₂|_l ∫_{piece l} g̃`.
pub fn pseudo_metric_general(w1: &PLWeighting, w2: &PLWeighting, envelope: &Envelope) -> Result<f64> {
    let (grid, s1, s2) = common_slopes(w1, w2)?;
    let mut terms = Vec::with_capacity(s1.len());
    for l in 0..s1.len() {
        terms.push((s1[l] - s2[l]).abs() * envelope.integral(grid[l], grid[l + 1])?);
    }
    Ok(compensated_sum(terms))
}

/// [`pseudo_metric_general`] for an arbitrary non-negative envelope.
pub fn pseudo_metric_with(w1: &PLWeighting, w2: &PLWeighting, envelope: &dyn Fn(f64) -> f64) -> Result<f64> {
    let (grid, s1, s2) = common_slopes(w1, w2)?;
    let mut terms = Vec::with_capacity(s1.len());
    for l in 0..s1.len() {
        terms.push((s1[l] - s2[l]).abs() * integral_checked(envelope, grid[l], grid[l + 1])?);
    }
    Ok(compensated_sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::reference::cpt_weighting;

    fn tenths() -> Vec<f64> {
        (0..=10).map(|i| i as f64 / 10.0).collect()
    }

    fn split_half() -> PLWeighting {
        PLWeighting::new_increasing(vec![0.0, 0.5, 1.0], vec![0.5, 1.5]).unwrap()
    }

    #[test]
    fn endpoints_and_identity() {
        let w = PLWeighting::interpolate(|p| cpt_weighting(p, 0.6), &tenths(), ShapeCheck::Enforce).unwrap();
        assert_eq!(w.eval(0.0).unwrap(), 0.0);
        assert_eq!(w.eval(1.0).unwrap(), 1.0);
        assert!((w.eval(0.5).unwrap() - 0.5).abs() < 1e-15);
        let flat = PLWeighting::new(tenths(), vec![1.0; 10], 0).unwrap();
        assert!((flat.eval(0.37).unwrap() - 0.37).abs() < 1e-15);
        assert!(w.eval(1.2).is_err());
    }

    #[test]
    fn interpolation_slopes() {
        let w = PLWeighting::interpolate(|p| p, &tenths(), ShapeCheck::Enforce).unwrap();
        assert!(w.slopes().iter().all(|&s| (s - 1.0).abs() < 1e-12));
        let w = PLWeighting::interpolate(|p| cpt_weighting(p, 0.6), &tenths(), ShapeCheck::Enforce).unwrap();
        assert_eq!(w.n_pieces(), 10);
        assert!((w.slopes()[0] - cpt_weighting(0.1, 0.6) / 0.1).abs() < 1e-12);
        assert_eq!(w.p_star(), 0.5);
        for (k, t) in tenths().iter().enumerate() {
            assert!((w.node_values()[k] - cpt_weighting(*t, 0.6)).abs() < 1e-15);
        }
    }

    #[test]
    fn inflection_lands_near_the_turn() {
        // Concave until 0.4, convex afterwards.
        let f = |p: f64| (p + (p - 0.4).powi(3) + 0.064) / 1.28;
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let w = PLWeighting::interpolate(f, &grid, ShapeCheck::Enforce).unwrap();
        assert!((w.p_star() - 0.4).abs() <= 0.05 + 1e-12, "{}", w.p_star());
    }

    #[test]
    fn rejects_non_inverse_s_when_enforced() {
        // Convex then concave (an S, not an inverse S).
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        let slopes = [0.5, 1.5, 1.5, 0.5];
        let f = |p: f64| {
            let mut acc = 0.0;
            for l in 0..4 {
                acc += slopes[l] * (p.min(grid[l + 1]) - grid[l]).max(0.0);
            }
            acc
        };
        assert!(PLWeighting::interpolate(f, &grid, ShapeCheck::Enforce).is_err());
        assert!(PLWeighting::interpolate(f, &grid, ShapeCheck::Skip).is_ok());
        assert!(PLWeighting::new(grid.to_vec(), slopes.to_vec(), 2).is_err());
    }

    #[test]
    fn metric_examples() {
        let one = PLWeighting::identity();
        let half = split_half();
        assert_eq!(pseudo_metric_l1(&half, &half).unwrap(), 0.0);
        assert!((pseudo_metric_l1(&one, &half).unwrap() - 0.5).abs() < 1e-15);
        assert!((pseudo_metric_l1(&half, &one).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(pseudo_metric_general(&one, &half, &Envelope::Constant(0.0)).unwrap(), 0.0);
        let linear = Envelope::Polynomial(vec![0.0, 1.0]);
        assert!((pseudo_metric_general(&one, &half, &linear).unwrap() - 0.25).abs() < 1e-14);
        assert!((pseudo_metric_with(&one, &half, &|t| t).unwrap() - 0.25).abs() < 1e-14);
        assert!(pseudo_metric_with(&one, &half, &|t| t - 0.7).is_err());
        assert!(pseudo_metric_general(&one, &half, &Envelope::Constant(f64::NAN)).is_err());
    }

    #[test]
    fn regrid_preserves_values() {
        let w = PLWeighting::interpolate(|p| cpt_weighting(p, 0.6), &tenths(), ShapeCheck::Enforce).unwrap();
        let fine: Vec<f64> = union_grid(&tenths(), &[0.05, 0.33, 0.91]);
        let r = w.regrid(&fine).unwrap();
        assert_eq!(r.p_star(), 0.5);
        for k in 0..=100 {
            let p = k as f64 / 100.0;
            assert!((r.eval(p).unwrap() - w.eval(p).unwrap()).abs() < 1e-15);
        }
        assert!(w.regrid(&[0.0, 0.5, 1.0]).is_err());
    }

    #[test]
    fn json_schema() {
        let w = split_half();
        let text = serde_json::to_string(&w).unwrap();
        assert_eq!(text, r#"{"breakpoints":[0.0,0.5,1.0],"slopes":[0.5,1.5],"p_star_index":0}"#);
        let back: PLWeighting = serde_json::from_str(&text).unwrap();
        assert_eq!(back, w);
        assert!(serde_json::from_str::<PLWeighting>(r#"{"breakpoints":[0,1],"slopes":[2],"p_star_index":0}"#).is_err());
    }
}
