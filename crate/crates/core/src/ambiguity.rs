//! Elicited preference information: pairwise comparisons, certainty
//! equivalents, the value-function domain, and balls of weighting functions;
//! plus the breakpoint grid on which all of them become linear in the slopes
//! and intercepts of a piecewise-linear value function.

use serde::{Deserialize, Serialize};

use crate::functions::{distorted_expectation, piece_index, pseudo_metric_general, Envelope, PLValueFunction, PLWeighting, DOMAIN_TOL};
use crate::numeric::{compensated_sum, CompensatedSum};
use crate::prospect::{pi_weights, Prospect};
use crate::{Error, Result};

/// Points closer than this are merged when building breakpoint grids.
pub const GRID_DEDUP_TOL: f64 = 1e-12;

/// Value-function domain `[lower, upper]` with its endpoint values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDomain")]
pub struct ValueDomain {
    pub lower: f64,
    pub upper: f64,
    pub left_value: f64,
    pub right_value: f64,
}

#[derive(Deserialize)]
struct RawDomain {
    lower: f64,
    upper: f64,
    left_value: f64,
    right_value: f64,
}

impl TryFrom<RawDomain> for ValueDomain {
    type Error = Error;
    fn try_from(r: RawDomain) -> Result<Self> {
        Self::new(r.lower, r.upper, r.left_value, r.right_value)
    }
}

impl ValueDomain {
    pub fn new(lower: f64, upper: f64, left_value: f64, right_value: f64) -> Result<Self> {
        if !(lower < 0.0 && 0.0 < upper && left_value < 0.0 && 0.0 < right_value) {
            return Err(Error::InvalidConfig(format!(
                "domain needs lower < 0 < upper and v(lower) < 0 < v(upper), got [{lower}, {upper}] -> [{left_value}, {right_value}]"
            )));
        }
        Ok(Self { lower, upper, left_value, right_value })
    }

    pub fn contains(&self, y: f64) -> bool {
        let slack = DOMAIN_TOL * (1.0 + self.lower.abs().max(self.upper.abs()));
        y >= self.lower - slack && y <= self.upper + slack
    }

    fn check(&self, y: f64) -> Result<()> {
        if self.contains(y) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { value: y, lower: self.lower, upper: self.upper })
        }
    }
}

/// Piecewise-constant function, `values[k]` on `[breakpoints[k],
/// breakpoints[k+1])` and zero outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::InvalidConfig("step function needs one more breakpoint than values".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) || breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("step function breakpoints must be finite and strictly increasing".into()));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let b = &self.breakpoints;
        if t < b[0] || t >= *b.last().expect("non-empty") {
            return 0.0;
        }
        self.values[b.partition_point(|&x| x <= t) - 1]
    }

    pub fn negated(&self) -> Self {
        Self { breakpoints: self.breakpoints.clone(), values: self.values.iter().map(|v| -v).collect() }
    }
}

/// A question "sure `r2` or the lottery paying `r3` with probability `p` and
/// `r1` otherwise", with `r2` the midpoint of `r1` and `r3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilitySplit {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub p: f64,
    /// Decision weight of the good lottery outcome.
    pub weight: f64,
    pub prefers_sure: bool,
}

/// A pairwise comparison recorded as `∫ φ dv <= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseRecord {
    pub phi: StepFunction,
    /// The utility-split question that produced the record, if any.
    pub question: Option<UtilitySplit>,
}

impl PairwiseRecord {
    /// Encodes the answer to a utility-split question.
    ///
    /// The lottery minus the sure amount is `∫ φ dv` with `φ = weight - 1` on
    /// `[r1, r2)` and `weight` on `[r2, r3)`. Preferring the sure amount
    /// means that integral is at most zero; preferring the lottery flips it.
    pub fn utility_split(r1: f64, r3: f64, p: f64, weight: f64, prefers_sure: bool) -> Result<Self> {
        if !(r1 < r3) || !(0.0 < weight && weight < 1.0) || !(0.0 < p && p < 1.0) {
            return Err(Error::InvalidConfig(format!("bad utility split r1={r1}, r3={r3}, p={p}, weight={weight}")));
        }
        let r2 = 0.5 * (r1 + r3);
        let phi = StepFunction::new(vec![r1, r2, r3], vec![weight - 1.0, weight])?;
        let phi = if prefers_sure { phi } else { phi.negated() };
        Ok(Self { phi, question: Some(UtilitySplit { r1, r2, r3, p, weight, prefers_sure }) })
    }

    pub fn from_step(phi: StepFunction) -> Self {
        Self { phi, question: None }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.phi.breakpoints
    }
}

/// A certainty-equivalent interval `[a_minus, a_plus]` for the prospect
/// paying `r` with probability `p` and zero otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCe")]
pub struct CertaintyEquivalentRecord {
    pub r: f64,
    pub p: f64,
    pub a_minus: f64,
    pub a_plus: f64,
}

#[derive(Deserialize)]
struct RawCe {
    r: f64,
    p: f64,
    a_minus: f64,
    a_plus: f64,
}

impl TryFrom<RawCe> for CertaintyEquivalentRecord {
    type Error = Error;
    fn try_from(c: RawCe) -> Result<Self> {
        Self::new(c.r, c.p, c.a_minus, c.a_plus)
    }
}

/// Which side of a certainty-equivalent interval a constraint encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CeBound {
    /// `E[v(A - a_plus)] <= 0`.
    Upper,
    /// `E[v(A - a_minus)] >= 0`.
    Lower,
}

impl CertaintyEquivalentRecord {
    pub fn new(r: f64, p: f64, a_minus: f64, a_plus: f64) -> Result<Self> {
        if !(0.0 < p && p < 1.0) || !(0.0 < a_minus && a_minus <= a_plus && a_plus < r) {
            return Err(Error::InvalidConfig(format!("need 0 < a- <= a+ < r and 0 < p < 1, got r={r}, p={p}, [{a_minus}, {a_plus}]")));
        }
        Ok(Self { r, p, a_minus, a_plus })
    }

    pub fn prospect(&self) -> Prospect {
        Prospect::canonicalize(&[0.0, self.r], &[1.0 - self.p, self.p]).expect("validated record")
    }

    pub fn bound(&self, which: CeBound) -> f64 {
        match which {
            CeBound::Upper => self.a_plus,
            CeBound::Lower => self.a_minus,
        }
    }

    /// The four shifted outcomes `{-a±, r - a±}`.
    pub fn shifted_points(&self) -> [f64; 4] {
        [-self.a_plus, -self.a_minus, self.r - self.a_plus, self.r - self.a_minus]
    }
}

/// Weightings within `radius` of `center` under the envelope pseudo-metric,
/// restricted to inverse-S weightings with the center's inflection point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBall")]
pub struct WeightingBall {
    pub center: PLWeighting,
    pub radius: f64,
    pub envelope: Envelope,
}

#[derive(Deserialize)]
struct RawBall {
    center: PLWeighting,
    radius: f64,
    #[serde(default)]
    envelope: Envelope,
}

impl TryFrom<RawBall> for WeightingBall {
    type Error = Error;
    fn try_from(b: RawBall) -> Result<Self> {
        Self::new(b.center, b.radius, b.envelope)
    }
}

impl WeightingBall {
    pub fn new(center: PLWeighting, radius: f64, envelope: Envelope) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::InvalidConfig(format!("ball radius {radius} must be finite and non-negative")));
        }
        if !center.is_inverse_s(crate::functions::SHAPE_TOL) {
            return Err(Error::InvalidConfig("ball center must be inverse-S".into()));
        }
        let ball = Self { center, radius, envelope };
        ball.piece_masses()?;
        Ok(ball)
    }

    /// `∫ g̃` over each piece of the center's grid.
    pub fn piece_masses(&self) -> Result<Vec<f64>> {
        let t = self.center.breakpoints();
        t.windows(2).map(|w| self.envelope.integral(w[0], w[1])).collect()
    }

    pub fn distance(&self, w: &PLWeighting) -> Result<f64> {
        pseudo_metric_general(w, &self.center, &self.envelope)
    }

    /// Membership up to an additive tolerance on the radius and a relative
    /// tolerance on the inverse-S slope ordering.
    pub fn contains(&self, w: &PLWeighting, tol: f64) -> Result<bool> {
        let shape = w.is_inverse_s(1e-7) && w.p_star() == self.center.p_star();
        Ok(shape && self.distance(w)? <= self.radius + tol)
    }
}

/// Fixed weightings used to evaluate certainty-equivalent constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CeWeightings {
    pub minus: PLWeighting,
    pub plus: PLWeighting,
}

/// Everything known about the decision maker's preferences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct AmbiguityModel {
    pub pairwise: Vec<PairwiseRecord>,
    pub ce: Vec<CertaintyEquivalentRecord>,
    pub ce_weightings: CeWeightings,
    pub domain: ValueDomain,
    pub ball_minus: WeightingBall,
    pub ball_plus: WeightingBall,
}

#[derive(Deserialize)]
struct RawModel {
    #[serde(default)]
    pairwise: Vec<PairwiseRecord>,
    #[serde(default)]
    ce: Vec<CertaintyEquivalentRecord>,
    ce_weightings: CeWeightings,
    domain: ValueDomain,
    ball_minus: WeightingBall,
    ball_plus: WeightingBall,
}

impl TryFrom<RawModel> for AmbiguityModel {
    type Error = Error;
    fn try_from(m: RawModel) -> Result<Self> {
        Self::new(m.pairwise, m.ce, (m.ce_weightings.minus, m.ce_weightings.plus), m.domain, m.ball_minus, m.ball_plus)
    }
}

impl AmbiguityModel {
    pub fn new(
        pairwise: Vec<PairwiseRecord>,
        ce: Vec<CertaintyEquivalentRecord>,
        ce_weightings: (PLWeighting, PLWeighting),
        domain: ValueDomain,
        ball_minus: WeightingBall,
        ball_plus: WeightingBall,
    ) -> Result<Self> {
        for rec in &pairwise {
            for &b in rec.breakpoints() {
                domain.check(b)?;
            }
        }
        for rec in &ce {
            for z in rec.shifted_points() {
                domain.check(z)?;
            }
        }
        let (minus, plus) = ce_weightings;
        Ok(Self { pairwise, ce, ce_weightings: CeWeightings { minus, plus }, domain, ball_minus, ball_plus })
    }

    /// The model keeping only the first `m` pairwise and `k` CE records.
    pub fn truncated(&self, m: usize, k: usize) -> Self {
        let mut out = self.clone();
        out.pairwise.truncate(m);
        out.ce.truncate(k);
        out
    }

    /// Largest violation of any record by `v`: the positive part of each
    /// `∫ φ dv`, of each upper CE expectation, and of minus each lower one.
    pub fn max_violation(&self, v: &PLValueFunction) -> Result<f64> {
        let mut worst = 0.0f64;
        for rec in &self.pairwise {
            let b = &rec.phi.breakpoints;
            let mut s = CompensatedSum::default();
            for (k, &c) in rec.phi.values.iter().enumerate() {
                s.add(c * (v.eval(b[k + 1])? - v.eval(b[k])?));
            }
            worst = worst.max(s.value());
        }
        let (wm, wp) = (&self.ce_weightings.minus, &self.ce_weightings.plus);
        for rec in &self.ce {
            let a = rec.prospect();
            let upper = distorted_expectation(v, wm, wp, &a, rec.a_plus)?;
            let lower = distorted_expectation(v, wm, wp, &a, rec.a_minus)?;
            worst = worst.max(upper).max(-lower);
        }
        Ok(worst)
    }

    /// The model with both ball radii replaced.
    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        let mut out = self.clone();
        out.ball_minus = WeightingBall::new(out.ball_minus.center, radius, out.ball_minus.envelope)?;
        out.ball_plus = WeightingBall::new(out.ball_plus.center, radius, out.ball_plus.envelope)?;
        Ok(out)
    }
}

/// Sorted breakpoints `y_0 < ... < y_{J-1}` containing the domain ends and
/// zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakpointGrid {
    points: Vec<f64>,
    zero: usize,
}

impl BreakpointGrid {
    /// Merges points within [`GRID_DEDUP_TOL`], preferring the domain ends and
    /// zero as representatives, and rejects points outside the domain.
    pub fn build(domain: &ValueDomain, extra: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut all: Vec<(f64, bool)> = vec![(domain.lower, true), (0.0, true), (domain.upper, true)];
        for y in extra {
            domain.check(y)?;
            all.push((y.clamp(domain.lower, domain.upper), false));
        }
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut points: Vec<f64> = Vec::with_capacity(all.len());
        let mut group_canonical = false;
        let mut last = f64::NEG_INFINITY;
        for (y, canonical) in all {
            if y - last <= GRID_DEDUP_TOL {
                if canonical && !group_canonical {
                    *points.last_mut().expect("group has a member") = y;
                    group_canonical = true;
                }
            } else {
                points.push(y);
                group_canonical = canonical;
            }
            last = y;
        }
        let zero = points.iter().position(|&y| y == 0.0).expect("zero is always present");
        Ok(Self { points, zero })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n_pieces(&self) -> usize {
        self.points.len() - 1
    }

    /// Breakpoint index of zero.
    pub fn zero_index(&self) -> usize {
        self.zero
    }

    pub fn widths(&self) -> Vec<f64> {
        self.points.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn piece_of(&self, y: f64) -> usize {
        piece_index(&self.points, y)
    }

    /// Index of the breakpoint within [`GRID_DEDUP_TOL`] of `y`.
    pub fn node_of(&self, y: f64) -> Option<usize> {
        let k = self.points.partition_point(|&p| p < y - GRID_DEDUP_TOL);
        (k < self.points.len() && (self.points[k] - y).abs() <= GRID_DEDUP_TOL).then_some(k)
    }
}

/// The grid for evaluating the worst case at `x`: record breakpoints, the
/// domain ends, zero, every `ξ_i - x`, and the shifted certainty-equivalent
/// outcomes.
pub fn build_breakpoint_grid(model: &AmbiguityModel, prospect: &Prospect, x: f64) -> Result<BreakpointGrid> {
    let shifted = prospect.support().iter().map(|xi| xi - x);
    BreakpointGrid::build(&model.domain, record_points(model).chain(shifted))
}

/// The grid carrying only the model's own points (no prospect).
pub fn record_grid(model: &AmbiguityModel) -> Result<BreakpointGrid> {
    BreakpointGrid::build(&model.domain, record_points(model))
}

fn record_points(model: &AmbiguityModel) -> impl Iterator<Item = f64> + '_ {
    let pair = model.pairwise.iter().flat_map(|r| r.breakpoints().iter().copied());
    let ce = model.ce.iter().flat_map(|r| r.shifted_points());
    pair.chain(ce)
}

/// `∫ φ` over each grid piece.
pub fn phi_integrals(record: &PairwiseRecord, grid: &BreakpointGrid) -> Result<Vec<f64>> {
    for &b in record.breakpoints() {
        if grid.node_of(b).is_none() {
            return Err(Error::GridMissingBreakpoint(b));
        }
    }
    let y = grid.points();
    Ok(y.windows(2).map(|w| record.phi.eval(0.5 * (w[0] + w[1])) * (w[1] - w[0])).collect())
}

/// Records that make `v` the only admissible function on any finer grid.
///
/// The breakpoints of `v` are refined by `0` and by the midpoint of every
/// resulting piece. Each increment between refined points gets
/// `φ = 1_{[z_k, z_{k+1})} - c_k` on the whole domain with
/// `c_k = Δv_k / (v(β) - v(α))`, once with each sign, so `∫ φ dv = 0` forces
/// `Δv_k` for any function anchored like `v`. A convex or concave function
/// that meets its chord at the midpoint is linear between the endpoints,
/// which pins it between the refined points too.
pub fn pinning_records(v: &PLValueFunction) -> Result<Vec<PairwiseRecord>> {
    let mut coarse = v.breakpoints().to_vec();
    if coarse[0] < 0.0 && 0.0 < coarse[coarse.len() - 1] && !coarse.contains(&0.0) {
        coarse.push(0.0);
        coarse.sort_by(f64::total_cmp);
    }
    let mut y = Vec::with_capacity(2 * coarse.len());
    for w in coarse.windows(2) {
        y.push(w[0]);
        y.push(0.5 * (w[0] + w[1]));
    }
    y.push(coarse[coarse.len() - 1]);
    let nodes = y.iter().map(|&z| v.eval(z)).collect::<Result<Vec<f64>>>()?;
    let last = y.len() - 1;
    let span = nodes[last] - nodes[0];
    let mut out = Vec::with_capacity(2 * last);
    for k in 0..last {
        let c = (nodes[k + 1] - nodes[k]) / span;
        let (mut b, mut vals) = (Vec::new(), Vec::new());
        if k > 0 {
            b.push(y[0]);
            vals.push(-c);
        }
        b.push(y[k]);
        vals.push(1.0 - c);
        b.push(y[k + 1]);
        if k + 1 < last {
            vals.push(-c);
            b.push(y[last]);
        }
        let phi = StepFunction::new(b, vals)?;
        out.push(PairwiseRecord::from_step(phi.negated()));
        out.push(PairwiseRecord::from_step(phi));
    }
    Ok(out)
}

/// Coefficients of a linear form in the per-piece slopes and intercepts.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    pub slope_coeffs: Vec<f64>,
    pub intercept_coeffs: Vec<f64>,
}

impl LinearForm {
    pub fn eval(&self, slopes: &[f64], intercepts: &[f64]) -> f64 {
        compensated_sum(self.slope_coeffs.iter().zip(slopes).chain(self.intercept_coeffs.iter().zip(intercepts)).map(|(c, v)| c * v))
    }
}

/// Linear form equal to `E[v(A - bound)]` under the fixed CE weightings for
/// the value function with the given per-piece slopes and intercepts.
pub fn ce_constraint_coeffs(record: &CertaintyEquivalentRecord, grid: &BreakpointGrid, weightings: &CeWeightings, which: CeBound) -> Result<LinearForm> {
    let prospect = record.prospect();
    let bound = record.bound(which);
    let split = prospect.sign_split(bound);
    let pi = pi_weights(&split, prospect.probs(), &weightings.minus, &weightings.plus);
    let p = grid.n_pieces();
    let mut form = LinearForm { slope_coeffs: vec![0.0; p], intercept_coeffs: vec![0.0; p] };
    for (&z, &w) in split.shifted.iter().zip(&pi.pi) {
        if grid.node_of(z).is_none() {
            return Err(Error::GridMissingBreakpoint(z));
        }
        let j = grid.piece_of(z);
        form.slope_coeffs[j] += w * z;
        form.intercept_coeffs[j] += w;
    }
    Ok(form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark;
    use crate::functions::{distorted_expectation, reference::true_value, PLValueFunction};

    fn base_model() -> AmbiguityModel {
        benchmark::empty_model(0.01)
    }

    #[test]
    fn grid_of_empty_model() {
        let p = Prospect::uniform(&[0.1, 0.2]).unwrap();
        let g = build_breakpoint_grid(&base_model(), &p, 0.0).unwrap();
        assert_eq!(g.points(), &[-0.5, 0.0, 0.1, 0.2, 0.5]);
        let g = build_breakpoint_grid(&base_model(), &p, 0.1).unwrap();
        assert_eq!(g.points(), &[-0.5, 0.0, 0.1, 0.5]);
    }

    #[test]
    fn grid_with_certainty_equivalent() {
        let mut m = base_model();
        m.ce.push(CertaintyEquivalentRecord::new(0.3, 0.5, 0.05, 0.1).unwrap());
        let p = Prospect::uniform(&[0.1, 0.2]).unwrap();
        let g = build_breakpoint_grid(&m, &p, 0.0).unwrap();
        let expect = [-0.5, -0.1, -0.05, 0.0, 0.1, 0.2, 0.25, 0.5];
        assert_eq!(g.len(), expect.len());
        for (a, b) in g.points().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn grid_rejects_escaping_points() {
        let p = Prospect::uniform(&[0.1, 0.9]).unwrap();
        assert!(matches!(build_breakpoint_grid(&base_model(), &p, 0.0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn grid_merges_near_duplicates_onto_zero() {
        let g = BreakpointGrid::build(&benchmark::benchmark_domain(), [1e-13, 0.2, 0.2 + 5e-13]).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.points()[1], 0.0);
    }

    #[test]
    fn phi_integral_examples() {
        let domain = ValueDomain::new(-0.2, 0.2, -1.0, 1.0).unwrap();
        let g = BreakpointGrid::build(&domain, []).unwrap();
        let zero = PairwiseRecord::from_step(StepFunction::new(vec![-0.2, 0.2], vec![0.0]).unwrap());
        assert_eq!(phi_integrals(&zero, &g).unwrap(), vec![0.0, 0.0]);
        let rec = PairwiseRecord::utility_split(-0.2, 0.2, 0.5, 0.5, true).unwrap();
        let c = phi_integrals(&rec, &g).unwrap();
        assert!((c[0] + 0.1).abs() < 1e-15 && (c[1] - 0.1).abs() < 1e-15);
        let coarse = BreakpointGrid::build(&ValueDomain::new(-0.5, 0.5, -1.0, 1.0).unwrap(), []).unwrap();
        assert!(matches!(phi_integrals(&rec, &coarse), Err(Error::GridMissingBreakpoint(_))));
    }

    #[test]
    fn phi_sum_matches_direct_comparison() {
        let w = benchmark::nominal_weighting();
        let (r1, r3, p) = (-0.3, 0.4, 0.3);
        let weight = w.eval(p).unwrap();
        let rec = PairwiseRecord::utility_split(r1, r3, p, weight, true).unwrap();
        let g = BreakpointGrid::build(&benchmark::benchmark_domain(), [r1, 0.05, r3, -0.1, 0.2]).unwrap();
        let v = PLValueFunction::interpolate(true_value, g.points()).unwrap();
        let lhs: f64 = phi_integrals(&rec, &g).unwrap().iter().zip(v.slopes()).map(|(c, a)| c * a).sum();
        let lottery = Prospect::canonicalize(&[r1, r3], &[1.0 - p, p]).unwrap();
        let sure = Prospect::degenerate(0.5 * (r1 + r3));
        let direct = distorted_expectation(&v, &w, &w, &lottery, 0.0).unwrap() - distorted_expectation(&v, &w, &w, &sure, 0.0).unwrap();
        assert!((lhs - direct).abs() < 1e-10, "{lhs} vs {direct}");
    }

    #[test]
    fn ce_form_examples() {
        let domain = ValueDomain::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let rec = CertaintyEquivalentRecord::new(0.4, 0.5, 0.2, 0.2).unwrap();
        let id = CeWeightings { minus: PLWeighting::identity(), plus: PLWeighting::identity() };
        let g = BreakpointGrid::build(&domain, rec.shifted_points()).unwrap();
        let form = ce_constraint_coeffs(&rec, &g, &id, CeBound::Upper).unwrap();
        let v = PLValueFunction::from_values(g.points(), g.points()).unwrap();
        assert!(form.eval(v.slopes(), v.intercepts()).abs() < 1e-15);
        // Weights are w-(1-p) on the loss atom and w+(p) on the gain atom.
        let w = benchmark::nominal_weighting();
        let cw = CeWeightings { minus: w.clone(), plus: w.clone() };
        let form = ce_constraint_coeffs(&rec, &g, &cw, CeBound::Lower).unwrap();
        assert!((form.intercept_coeffs.iter().sum::<f64>() - 2.0 * w.eval(0.5).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn ce_form_matches_distorted_expectation() {
        let rec = CertaintyEquivalentRecord::new(0.35, 0.7, 0.12, 0.15).unwrap();
        let m = base_model();
        let g = BreakpointGrid::build(&m.domain, rec.shifted_points().into_iter().chain([0.1, -0.3])).unwrap();
        let v = benchmark::discretized_truth(g.points()).unwrap();
        for which in [CeBound::Upper, CeBound::Lower] {
            let form = ce_constraint_coeffs(&rec, &g, &m.ce_weightings, which).unwrap();
            let direct = distorted_expectation(&v, &m.ce_weightings.minus, &m.ce_weightings.plus, &rec.prospect(), rec.bound(which)).unwrap();
            assert!((form.eval(v.slopes(), v.intercepts()) - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn model_json_round_trip() {
        let mut m = base_model();
        m.pairwise.push(PairwiseRecord::utility_split(-0.3, 0.1, 0.4, 0.42, false).unwrap());
        m.ce.push(CertaintyEquivalentRecord::new(0.3, 0.5, 0.05, 0.1).unwrap());
        let text = serde_json::to_string_pretty(&m).unwrap();
        let back: AmbiguityModel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn ball_membership() {
        let w = benchmark::nominal_weighting();
        let ball = WeightingBall::new(w.clone(), 0.0, Envelope::default()).unwrap();
        assert!(ball.contains(&w, 1e-12).unwrap());
        assert!(WeightingBall::new(w, -0.1, Envelope::default()).is_err());
    }
}
