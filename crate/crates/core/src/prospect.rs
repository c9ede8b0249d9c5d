//! Finitely supported prospects and the rank-dependent probability weights of
//! a shifted prospect.

use serde::{Deserialize, Serialize};

use crate::functions::PLWeighting;
use crate::numeric::CompensatedSum;
use crate::{Error, Result};

/// A random outcome with finitely many values.
///
/// `support` is strictly increasing and `probs` are positive and sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProspect")]
pub struct Prospect {
    support: Vec<f64>,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawProspect {
    support: Vec<f64>,
    probs: Vec<f64>,
}

impl TryFrom<RawProspect> for Prospect {
    type Error = Error;
    fn try_from(raw: RawProspect) -> Result<Self> {
        Prospect::canonicalize(&raw.support, &raw.probs)
    }
}

/// Tolerance on the probability total accepted by [`Prospect::canonicalize`].
pub const PROB_SUM_TOL: f64 = 1e-9;

impl Prospect {
    /// Sorts outcomes, merges duplicates by adding their probabilities, and
    /// rescales so the probabilities sum to one.
    pub fn canonicalize(outcomes: &[f64], probs: &[f64]) -> Result<Self> {
        if outcomes.len() != probs.len() {
            return Err(Error::InvalidProspect(format!("{} outcomes but {} probabilities", outcomes.len(), probs.len())));
        }
        if outcomes.is_empty() {
            return Err(Error::InvalidProspect("empty support".into()));
        }
        if let Some(x) = outcomes.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidProspect(format!("non-finite outcome {x}")));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::InvalidProspect(format!("probability {p} is not positive")));
        }
        let total = crate::numeric::compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidProspect(format!("probabilities sum to {total}")));
        }
        let mut pairs: Vec<(f64, f64)> = outcomes.iter().copied().zip(probs.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut support: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut merged: Vec<CompensatedSum> = Vec::with_capacity(pairs.len());
        for (x, p) in pairs {
            if support.last() == Some(&x) {
                merged.last_mut().expect("non-empty").add(p);
            } else {
                support.push(x);
                let mut acc = CompensatedSum::default();
                acc.add(p);
                merged.push(acc);
            }
        }
        // Re-summed in sorted order so that permuted inputs scale identically.
        let total = crate::numeric::compensated_sum(merged.iter().map(|acc| acc.value()));
        let probs: Vec<f64> = merged.iter().map(|acc| acc.value() / total).collect();
        Ok(Self { support, probs })
    }

    /// Point mass at `c`.
    pub fn degenerate(c: f64) -> Self {
        Self { support: vec![c], probs: vec![1.0] }
    }

    /// Equally likely outcomes.
    pub fn uniform(outcomes: &[f64]) -> Result<Self> {
        let p = 1.0 / outcomes.len().max(1) as f64;
        Self::canonicalize(outcomes, &vec![p; outcomes.len()])
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.support[0]
    }

    pub fn max(&self) -> f64 {
        *self.support.last().expect("support is non-empty")
    }

    /// The prospect `ξ + c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self { support: self.support.iter().map(|x| x + c).collect(), probs: self.probs.clone() }
    }

    /// Splits `ξ - x` at zero.
    pub fn sign_split(&self, x: f64) -> SignSplit {
        sign_split(self, x)
    }

    /// Cumulative probabilities `q_i = P(ξ <= ξ_i)` with compensated
    /// summation; the last entry is exactly one.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = CompensatedSum::default();
        let mut out: Vec<f64> = self
            .probs
            .iter()
            .map(|&p| {
                acc.add(p);
                acc.value()
            })
            .collect();
        if let Some(last) = out.last_mut() {
            *last = 1.0;
        }
        out
    }

    /// Tail probabilities `P(ξ >= ξ_i)`, accumulated from the right.
    pub fn tails(&self) -> Vec<f64> {
        let mut acc = CompensatedSum::default();
        let mut out = vec![0.0; self.probs.len()];
        for (i, &p) in self.probs.iter().enumerate().rev() {
            acc.add(p);
            out[i] = acc.value();
        }
        if let Some(first) = out.first_mut() {
            *first = 1.0;
        }
        out
    }
}

/// Outcomes of `ξ - x`, sorted, with the first `m` strictly negative.
#[derive(Debug, Clone, PartialEq)]
pub struct SignSplit {
    pub m: usize,
    pub n_plus_1: usize,
    pub shifted: Vec<f64>,
}

pub fn sign_split(p: &Prospect, x: f64) -> SignSplit {
    let shifted: Vec<f64> = p.support.iter().map(|xi| xi - x).collect();
    let m = shifted.partition_point(|&z| z < 0.0);
    SignSplit { m, n_plus_1: shifted.len() - m, shifted }
}

/// Decision weights of the sorted shifted outcomes, index 0 being the
/// smallest outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct PiWeights {
    pub pi: Vec<f64>,
    /// Number of leading weights that belong to strictly negative outcomes.
    pub m: usize,
}

impl PiWeights {
    pub fn total(&self) -> f64 {
        crate::numeric::compensated_sum(self.pi.iter().copied())
    }
}

/// Negative outcomes take increments of `w_minus` over cumulative
/// probabilities from the left; non-negative outcomes take increments of
/// `w_plus` over tail probabilities from the right.
pub fn pi_weights(split: &SignSplit, probs: &[f64], w_minus: &PLWeighting, w_plus: &PLWeighting) -> PiWeights {
    let n = probs.len();
    let m = split.m;
    let mut pi = vec![0.0; n];

    let mut acc = CompensatedSum::default();
    let mut prev = 0.0;
    for i in 0..m {
        acc.add(probs[i]);
        let q = if i + 1 == n { 1.0 } else { acc.value().min(1.0) };
        let wq = w_minus.eval_clamped(q);
        pi[i] = wq - prev;
        prev = wq;
    }

    let mut acc = CompensatedSum::default();
    let mut prev = 0.0;
    for i in (m..n).rev() {
        acc.add(probs[i]);
        let tail = if i == 0 { 1.0 } else { acc.value().min(1.0) };
        let wt = w_plus.eval_clamped(tail);
        pi[i] = wt - prev;
        prev = wt;
    }
    PiWeights { pi, m }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{reference, PLWeighting};

    #[test]
    fn canonicalize_singleton_and_duplicates() {
        let p = Prospect::canonicalize(&[1.0], &[1.0]).unwrap();
        assert_eq!(p.support(), &[1.0]);
        assert_eq!(p.probs(), &[1.0]);
        let p = Prospect::canonicalize(&[0.5, 0.5, 0.2], &[0.3, 0.3, 0.4]).unwrap();
        assert_eq!(p.support(), &[0.2, 0.5]);
        assert!((p.probs()[0] - 0.4).abs() < 1e-15 && (p.probs()[1] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn canonicalize_rejects_bad_input() {
        assert!(Prospect::canonicalize(&[1.0, 2.0], &[1.0]).is_err());
        assert!(Prospect::canonicalize(&[1.0, 2.0], &[1.0, 0.0]).is_err());
        assert!(Prospect::canonicalize(&[1.0, 2.0], &[0.5, 0.6]).is_err());
        assert!(Prospect::canonicalize(&[], &[]).is_err());
    }

    #[test]
    fn benchmark_prospect_is_sorted() {
        let p = crate::benchmark::benchmark_prospect();
        assert_eq!(p.len(), 10);
        assert_eq!(&p.support()[..2], &[0.0488, 0.0635]);
        assert!(p.support().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sign_split_examples() {
        let p = Prospect::canonicalize(&[-1.0, 2.0], &[0.5, 0.5]).unwrap();
        let s = sign_split(&p, 0.0);
        assert_eq!((s.m, s.n_plus_1), (1, 1));
        let p = Prospect::canonicalize(&[1.0, 2.0], &[0.5, 0.5]).unwrap();
        assert_eq!(sign_split(&p, 3.0).m, 2);
        let s = sign_split(&p, 1.0);
        assert_eq!((s.m, s.n_plus_1), (0, 2));
        assert_eq!(s.shifted, vec![0.0, 1.0]);
    }

    #[test]
    fn identity_weights_reproduce_probabilities() {
        let id = PLWeighting::identity();
        let p = Prospect::canonicalize(&[-0.3, -0.1, 0.0, 0.2, 0.4], &[0.1, 0.2, 0.3, 0.25, 0.15]).unwrap();
        for x in [-1.0, -0.1, 0.0, 0.1, 0.5] {
            let w = pi_weights(&p.sign_split(x), p.probs(), &id, &id);
            for (a, b) in w.pi.iter().zip(p.probs()) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn squared_weighting_on_two_points() {
        // w(p) = p^2 interpolated on a fine grid; exact at 0.5 and 1.
        let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        let sq = PLWeighting::interpolate(|t| t * t, &grid, crate::functions::ShapeCheck::Skip).unwrap();
        let p = Prospect::canonicalize(&[-1.0, 1.0], &[0.5, 0.5]).unwrap();
        let w = pi_weights(&p.sign_split(0.0), p.probs(), &sq, &sq);
        assert!((w.pi[0] - 0.25).abs() < 1e-12);
        assert!((w.pi[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn benchmark_weights_are_successive_differences() {
        let w = crate::benchmark::nominal_weighting();
        let p = crate::benchmark::benchmark_prospect();
        let pw = pi_weights(&p.sign_split(0.0), p.probs(), &w, &w);
        assert_eq!(pw.m, 0);
        for (i, pi) in pw.pi.iter().enumerate() {
            // Outcome i (0-based from the smallest) has tail (10 - i)/10.
            let k = (10 - i) as f64;
            let expect = reference::cpt_weighting(k / 10.0, 0.6) - reference::cpt_weighting((k - 1.0) / 10.0, 0.6);
            assert!((pi - expect).abs() < 1e-12, "{i}: {pi} vs {expect}");
        }
    }
}
