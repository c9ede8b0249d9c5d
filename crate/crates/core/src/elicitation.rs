//! A simulated decision maker and the two adaptive questionnaires that grow
//! an ambiguity model: utility splits answered by pairwise comparison, and
//! certainty-equivalent intervals.
//!
//! A session draws pairwise questions and CE questions from two separate
//! ChaCha streams of the same seed, so the first `m` pairwise and first `k`
//! CE records of a longer session are exactly those of a shorter one.

use prgsr_lp::{DenseSimplex, LpProblem, LpSolver, RowKind, Sense};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::ambiguity::{phi_integrals, record_grid, AmbiguityModel, BreakpointGrid, CertaintyEquivalentRecord, PairwiseRecord};
use crate::functions::reference::ReferenceFunctions;
use crate::numeric::bisect_decreasing;
use crate::reformulation::ValueSpace;
use crate::{Error, Result};

const PAIRWISE_STREAM: u64 = 1;
const CE_STREAM: u64 = 2;

/// Redraws allowed for a CE question before the session gives up.
pub const MAX_CE_REDRAWS: usize = 100;

/// Answers questions with closed-form preferences.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SimulatedDM {
    pub truth: ReferenceFunctions,
}

impl SimulatedDM {
    /// `(v(r2) - v(r1)) / (v(r3) - v(r1))` under the true value function.
    pub fn split_ratio(&self, r1: f64, r2: f64, r3: f64) -> f64 {
        let v = |y| self.truth.value(y);
        (v(r2) - v(r1)) / (v(r3) - v(r1))
    }

    /// Whether the sure amount `r2` beats the lottery paying `r3` with
    /// probability `p` and `r1` otherwise, given `weight = w(p)`. A tie
    /// goes to the lottery.
    pub fn prefers_sure(&self, r1: f64, r2: f64, r3: f64, weight: f64) -> bool {
        self.split_ratio(r1, r2, r3) > weight
    }

    /// Shortfall risk of the prospect paying `r` with probability `p` and
    /// zero otherwise: the root of
    /// `v(r - x) w(p) + v(-x) (1 - w(p))` on `[0, r]`.
    pub fn certainty_equivalent(&self, r: f64, p: f64) -> Result<f64> {
        if !(r > 0.0) || !(0.0 < p && p < 1.0) {
            return Err(Error::Elicitation(format!("degenerate certainty-equivalent question r={r}, p={p}")));
        }
        let w = self.truth.weighting(p);
        let f = |x: f64| Ok::<f64, Error>(self.truth.value(r - x) * w + self.truth.value(-x) * (1.0 - w));
        let (lo, hi, _) = bisect_decreasing(f, 0.0, r, 1e-15 * r.max(1.0), 200)?;
        Ok(0.5 * (lo + hi))
    }
}

/// One asked question and its outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Question {
    Pairwise {
        r1: f64,
        r2: f64,
        r3: f64,
        /// Range of the normalized value at `r2` before the answer.
        lower: f64,
        upper: f64,
        p: f64,
        weight: f64,
        prefers_sure: bool,
    },
    CertaintyEquivalent {
        r: f64,
        p: f64,
        tau: f64,
        rho_true: f64,
        a_minus: f64,
        a_plus: f64,
        /// Draws rejected before this one.
        redraws: usize,
    },
}

/// Serializable record of a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub seed: u64,
    pub tau_max: f64,
    pub questions: Vec<Question>,
    pub model: AmbiguityModel,
}

#[derive(Debug, Clone)]
pub struct ElicitationSession {
    seed: u64,
    model: AmbiguityModel,
    dm: SimulatedDM,
    tau_max: f64,
    pairwise_rng: ChaCha20Rng,
    ce_rng: ChaCha20Rng,
    questions: Vec<Question>,
}

/// The range `[I₁, I₂]` of the normalized value at a probe midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitInterval {
    pub lower: f64,
    pub upper: f64,
}

impl ElicitationSession {
    /// A session adding records to `base`. CE interval half-widths are
    /// drawn uniformly from `[0, tau_max]` relative to the true value.
    pub fn new(base: AmbiguityModel, dm: SimulatedDM, seed: u64, tau_max: f64) -> Result<Self> {
        if !(tau_max >= 0.0 && tau_max < 1.0) {
            return Err(Error::InvalidConfig(format!("tau_max must lie in [0, 1), got {tau_max}")));
        }
        let mut pairwise_rng = ChaCha20Rng::seed_from_u64(seed);
        pairwise_rng.set_stream(PAIRWISE_STREAM);
        let mut ce_rng = ChaCha20Rng::seed_from_u64(seed);
        ce_rng.set_stream(CE_STREAM);
        Ok(Self { seed, model: base, dm, tau_max, pairwise_rng, ce_rng, questions: Vec::new() })
    }

    pub fn model(&self) -> &AmbiguityModel {
        &self.model
    }

    pub fn questions(&self) -> &[Question] {
        &self.questions
    }

    pub fn transcript(&self) -> Transcript {
        Transcript { seed: self.seed, tau_max: self.tau_max, questions: self.questions.clone(), model: self.model.clone() }
    }

    /// Asks `m` pairwise questions and then `k` CE questions.
    pub fn run(&mut self, m: usize, k: usize) -> Result<()> {
        for _ in 0..m {
            self.next_pairwise_question()?;
        }
        for _ in 0..k {
            self.next_ce_question()?;
        }
        Ok(())
    }

    /// Range of `(v(r2) - v(r1)) / (v(r3) - v(r1))` over S-shaped functions
    /// consistent with the pairwise answers so far.
    ///
    /// Pairwise answers and shape are unchanged by positive affine maps of
    /// `v`, so the program fixes `v(r3) - v(r1)` at the span of the domain's
    /// reference levels and ranges `v(r2) - v(r1)` instead.
    pub fn probe_interval(&self, r1: f64, r2: f64, r3: f64) -> Result<SplitInterval> {
        let grid = BreakpointGrid::build(&self.model.domain, self.pairwise_points().chain([r1, r2, r3]))?;
        let node = |z: f64| grid.node_of(z).ok_or(Error::GridMissingBreakpoint(z));
        let (k1, k2, k3) = (node(r1)?, node(r2)?, node(r3)?);
        let widths = grid.widths();
        let pieces = widths.len();
        let j0 = grid.zero_index();
        let span = self.model.domain.right_value - self.model.domain.left_value;

        // Variables are the non-negative piece slopes.
        let mut p = LpProblem::new(Sense::Maximize, pieces);
        p.add_row("anchors", (k1..k3).map(|j| (j, widths[j])), RowKind::Eq, span);
        for j in 0..pieces.saturating_sub(1) {
            if j + 1 < j0 {
                p.add_row("convex_losses", [(j, 1.0), (j + 1, -1.0)], RowKind::Le, 0.0);
            } else if j >= j0 {
                p.add_row("concave_gains", [(j + 1, 1.0), (j, -1.0)], RowKind::Le, 0.0);
            }
        }
        for rec in &self.model.pairwise {
            p.add_row("pairwise", phi_integrals(rec, &grid)?.into_iter().enumerate(), RowKind::Le, 0.0);
        }
        let mut up = vec![0.0; pieces];
        for j in k1..k2 {
            up[j] = widths[j];
        }
        let down: Vec<f64> = up.iter().map(|c| -c).collect();
        let sols = DenseSimplex::default().solve_many(&p, &[up, down]);
        for sol in &sols {
            if !sol.is_optimal() {
                return Err(Error::Elicitation(format!("split-range program ended with {:?}", sol.status)));
            }
        }
        Ok(SplitInterval { lower: -sols[1].objective / span, upper: sols[0].objective / span })
    }

    fn pairwise_points(&self) -> impl Iterator<Item = f64> + '_ {
        self.model.pairwise.iter().flat_map(|r| r.breakpoints().iter().copied())
    }

    /// Draws a probe, splits its feasible range in half through the
    /// lottery probability, and records the answer.
    pub fn next_pairwise_question(&mut self) -> Result<&PairwiseRecord> {
        let (lo, hi) = (self.model.domain.lower, self.model.domain.upper);
        let (r1, r3) = loop {
            let a = self.pairwise_rng.gen_range(lo..=hi);
            let b = self.pairwise_rng.gen_range(lo..=hi);
            if a != b {
                break (a.min(b), a.max(b));
            }
        };
        let r2 = 0.5 * (r1 + r3);
        let interval = self.probe_interval(r1, r2, r3)?;
        let weight = 0.5 * (interval.lower + interval.upper);
        if !(0.0 < weight && weight < 1.0) {
            return Err(Error::Elicitation(format!("split value {weight} has no lottery probability")));
        }
        let p = self.dm.truth.weighting_inverse(weight);
        let prefers_sure = self.dm.prefers_sure(r1, r2, r3, weight);
        let record = PairwiseRecord::utility_split(r1, r3, p, weight, prefers_sure)?;
        self.model.pairwise.push(record);
        self.questions.push(Question::Pairwise { r1, r2, r3, lower: interval.lower, upper: interval.upper, p, weight, prefers_sure });
        Ok(self.model.pairwise.last().expect("just pushed"))
    }

    /// Draws `(r, p, τ)`, brackets the true certainty equivalent by
    /// `(1 ∓ τ)`, and keeps the record if the value polytope stays
    /// non-empty. Degenerate or rejected draws are redrawn.
    pub fn next_ce_question(&mut self) -> Result<&CertaintyEquivalentRecord> {
        let upper = self.model.domain.upper.min(0.5);
        for redraws in 0..=MAX_CE_REDRAWS {
            let r = self.ce_rng.gen_range(0.0..=upper);
            let p = self.ce_rng.gen_range(1..=9) as f64 / 10.0;
            let tau = self.ce_rng.gen_range(0.0..=self.tau_max);
            let Ok(rho_true) = self.dm.certainty_equivalent(r, p) else {
                continue;
            };
            let (a_minus, a_plus) = ((1.0 - tau) * rho_true, (1.0 + tau) * rho_true);
            let Ok(record) = CertaintyEquivalentRecord::new(r, p, a_minus, a_plus) else {
                continue;
            };
            let mut candidate = self.model.clone();
            candidate.ce.push(record);
            if !value_polytope_nonempty(&candidate)? {
                continue;
            }
            self.model = candidate;
            self.questions.push(Question::CertaintyEquivalent { r, p, tau, rho_true, a_minus, a_plus, redraws });
            return Ok(self.model.ce.last().expect("just pushed"));
        }
        Err(Error::Elicitation(format!("no admissible certainty-equivalent question after {MAX_CE_REDRAWS} redraws")))
    }
}

/// Whether some admissible value function exists on the model's own grid.
/// Refining the grid keeps a non-empty set non-empty, so this also decides
/// feasibility of the worst-case program at every `x`.
pub fn value_polytope_nonempty(model: &AmbiguityModel) -> Result<bool> {
    let space = ValueSpace::new(model, record_grid(model)?)?;
    let sol = DenseSimplex::default().solve(&space.problem);
    match sol.status {
        prgsr_lp::LpStatus::Optimal => Ok(true),
        prgsr_lp::LpStatus::Infeasible => Ok(false),
        other => Err(Error::Lp(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::empty_model;

    fn session(seed: u64, tau_max: f64) -> ElicitationSession {
        ElicitationSession::new(empty_model(0.01), SimulatedDM::default(), seed, tau_max).unwrap()
    }

    #[test]
    fn certainty_equivalent_solves_the_reference_equation() {
        // With w(0.5) = 0.5 the root solves (0.4 - x)^(1/3) = 1.5 x^0.2.
        let rho = SimulatedDM::default().certainty_equivalent(0.4, 0.5).unwrap();
        let g = |x: f64| (0.4 - x).cbrt() - 1.5 * x.powf(0.2);
        // Independent root by a fine scan followed by the secant method.
        let n = 4000;
        let k = (0..n).find(|&k| g(0.4 * (k + 1) as f64 / n as f64) < 0.0).unwrap();
        let (mut a, mut b) = (0.4 * k as f64 / n as f64, 0.4 * (k + 1) as f64 / n as f64);
        for _ in 0..60 {
            let c = b - g(b) * (b - a) / (g(b) - g(a));
            if !c.is_finite() || c == b {
                break;
            }
            a = b;
            b = c;
        }
        assert!((rho - b).abs() <= 1e-12, "{rho} vs {b}");
        assert!(rho > 0.0 && rho < 0.4);
    }

    #[test]
    fn degenerate_ce_question_is_rejected() {
        let dm = SimulatedDM::default();
        assert!(dm.certainty_equivalent(0.0, 0.5).is_err());
        assert!(dm.certainty_equivalent(0.3, 1.0).is_err());
    }

    #[test]
    fn tie_goes_to_the_lottery() {
        let dm = SimulatedDM::default();
        let ratio = dm.split_ratio(-0.3, -0.1, 0.2);
        assert!(!dm.prefers_sure(-0.3, -0.1, 0.2, ratio));
        assert!(dm.prefers_sure(-0.3, -0.1, 0.2, ratio - 1e-9));
    }

    #[test]
    fn first_probe_brackets_the_truth_and_answers_shrink_it() {
        let mut s = session(7, 0.05);
        s.next_pairwise_question().unwrap();
        let Question::Pairwise { r1, r2, r3, lower, upper, .. } = s.questions()[0].clone() else { panic!("expected a pairwise question") };
        let truth = s.dm.split_ratio(r1, r2, r3);
        assert!(lower <= truth && truth <= upper, "{lower} {truth} {upper}");
        let after = s.probe_interval(r1, r2, r3).unwrap();
        assert!(after.lower <= truth + 1e-9 && truth <= after.upper + 1e-9);
        assert!(after.upper - after.lower <= upper - lower + 1e-12);
    }

    #[test]
    fn zero_tau_gives_exact_certainty_equivalents() {
        let mut s = session(3, 0.0);
        s.next_ce_question().unwrap();
        let Question::CertaintyEquivalent { tau, rho_true, a_minus, a_plus, .. } = s.questions()[0].clone() else { panic!("expected a CE question") };
        assert_eq!(tau, 0.0);
        assert_eq!(a_minus, rho_true);
        assert_eq!(a_plus, rho_true);
    }

    #[test]
    fn ce_records_bracket_the_true_value() {
        let mut s = session(5, 0.05);
        s.run(0, 6).unwrap();
        for q in s.questions() {
            let Question::CertaintyEquivalent { p, rho_true, a_minus, a_plus, .. } = q else { panic!("expected a CE question") };
            assert!(a_minus <= rho_true && rho_true <= a_plus);
            assert!((1..=9).any(|k| (*p - k as f64 / 10.0).abs() < 1e-15));
        }
    }

    #[test]
    fn sessions_are_reproducible_and_nested() {
        let mut a = session(11, 0.05);
        a.run(4, 3).unwrap();
        let mut b = session(11, 0.05);
        b.run(4, 3).unwrap();
        assert_eq!(serde_json::to_string(&a.transcript()).unwrap(), serde_json::to_string(&b.transcript()).unwrap());
        let mut c = session(11, 0.05);
        c.run(2, 1).unwrap();
        assert_eq!(c.model().pairwise[..], a.model().pairwise[..2]);
        assert_eq!(c.model().ce[..], a.model().ce[..1]);
    }

    #[test]
    fn out_of_range_tau_is_rejected() {
        assert!(ElicitationSession::new(empty_model(0.01), SimulatedDM::default(), 0, 1.0).is_err());
        assert!(ElicitationSession::new(empty_model(0.01), SimulatedDM::default(), 0, -0.1).is_err());
    }
}
