//! Brute-force cross-checks for instances small enough to enumerate.
//!
//! [`oracle_h`] maximizes the distorted expectation over a grid of
//! admissible preference tuples and reports a resolution bound next to the
//! grid maximum; the LP value must lie between them.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::ambiguity::{build_breakpoint_grid, AmbiguityModel, PairwiseRecord, ValueDomain, WeightingBall};
use crate::functions::reference::ReferenceFunctions;
use crate::functions::{distorted_expectation, Envelope, PLValueFunction, PLWeighting, ShapeCheck, EPS_POS, SHAPE_TOL};
use crate::gsr::BisectionConfig;
use crate::prospect::{pi_weights, sign_split, Prospect};
use crate::reformulation::WorstCaseTuple;
use crate::robust::{robust_constraint_root, worst_gsr_finite};
use crate::{Error, Result};

pub const MAX_OUTCOMES: usize = 3;
pub const MAX_WEIGHT_PIECES: usize = 3;
pub const MAX_VALUE_NODES: usize = 6;

/// Slack on record and ball constraints accepted for grid candidates.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Grid cells allowed between the true maximizer and the nearest admissible
/// grid point when forming the resolution bound.
pub const BOUND_CELLS: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    /// Largest distorted expectation over admissible grid tuples.
    pub value: f64,
    /// Resolution bound on the distance from `value` to the true supremum.
    pub bound: f64,
    pub value_candidates: usize,
    pub feasible_values: usize,
    pub minus_candidates: usize,
    pub plus_candidates: usize,
}

/// Admissible grid weightings of one ball: `T - 1` free slopes on lattices
/// through the center with the ball's bounding box as extent, the last
/// slope closing the normalization. Returns the candidates and the lattice
/// step.
fn weighting_candidates(ball: &WeightingBall, res: usize) -> Result<(Vec<PLWeighting>, f64)> {
    let center = &ball.center;
    let t = center.breakpoints().to_vec();
    let psi0 = center.slopes();
    let widths = center.piece_widths();
    let masses = ball.piece_masses()?;
    let n = psi0.len();
    let half = (res / 2).max(1) as i64;
    let mut step = 0.0f64;
    let axes: Vec<Vec<f64>> = (0..n - 1)
        .map(|l| {
            let reach = if masses[l] > 0.0 { ball.radius / masses[l] } else { 0.0 };
            let h = reach / half as f64;
            step = step.max(h);
            if h == 0.0 {
                return vec![psi0[l]];
            }
            (-half..=half).map(|k| psi0[l] + k as f64 * h).filter(|&s| s >= EPS_POS).collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n - 1];
    loop {
        let mut slopes: Vec<f64> = idx.iter().enumerate().map(|(l, &k)| axes[l][k]).collect();
        let used: f64 = slopes.iter().zip(&widths).map(|(s, d)| s * d).sum();
        let last = (1.0 - used) / widths[n - 1];
        if last >= EPS_POS {
            slopes.push(last);
            if let Ok(w) = PLWeighting::with_tolerance(t.clone(), slopes, center.p_star_index(), SHAPE_TOL) {
                if ball.distance(&w)? <= ball.radius + FEASIBILITY_TOL {
                    out.push(w);
                }
            }
        }
        let mut l = 0;
        loop {
            if l == n - 1 {
                return Ok((out, step));
            }
            idx[l] += 1;
            if idx[l] < axes[l].len() {
                break;
            }
            idx[l] = 0;
            l += 1;
        }
    }
}

fn slopes_admissible(y: &[f64], u: &[f64], j0: usize) -> bool {
    let a: Vec<f64> = (0..y.len() - 1).map(|j| (u[j + 1] - u[j]) / (y[j + 1] - y[j])).collect();
    if a.iter().any(|&s| s < EPS_POS) {
        return false;
    }
    let scale = a.iter().fold(1.0f64, |m, &s| m.max(s));
    let tol = FEASIBILITY_TOL * scale;
    (0..a.len().saturating_sub(1)).all(|j| {
        if j + 1 < j0 {
            a[j] <= a[j + 1] + tol
        } else if j >= j0 {
            a[j + 1] <= a[j] + tol
        } else {
            true
        }
    })
}

/// Grid maximum of `E[v(ξ - x)]` over admissible `(v, w⁻, w⁺)` with a
/// Lipschitz resolution bound.
///
/// Value functions live on the breakpoint grid of the worst-case program
/// and are enumerated by their node values. The domain ends and zero are
/// fixed; every other node ranges over `res_v + 1` points between the
/// monotone bound and the chord bound of its side. Weightings are
/// enumerated by [`weighting_candidates`] and maximized per side, which is
/// exact because the objective separates across the two sides once `v` is
/// fixed.
///
/// The bound is `BOUND_CELLS` lattice steps in every coordinate, scaled by
/// the objective's Lipschitz constants: outcome weights sum to at most two
/// for node values, and a slope step `h` on side `s` moves the expectation
/// by at most `2 h Σ_{l<T} Δ_l max|v|`.
pub fn oracle_h(model: &AmbiguityModel, prospect: &Prospect, x: f64, res_v: usize, res_psi: usize) -> Result<OracleValue> {
    let grid = build_breakpoint_grid(model, prospect, x)?;
    let n_pieces = model.ball_minus.center.n_pieces().max(model.ball_plus.center.n_pieces());
    if prospect.len() > MAX_OUTCOMES || n_pieces > MAX_WEIGHT_PIECES || grid.len() > MAX_VALUE_NODES {
        return Err(Error::InvalidConfig(format!(
            "oracle instance too large: N={}, T={n_pieces}, J={} exceed {MAX_OUTCOMES}, {MAX_WEIGHT_PIECES}, {MAX_VALUE_NODES}",
            prospect.len(),
            grid.len()
        )));
    }
    if res_v == 0 || res_psi == 0 {
        return Err(Error::InvalidConfig("oracle resolutions must be positive".into()));
    }
    let y = grid.points().to_vec();
    let j0 = grid.zero_index();
    let dom = &model.domain;
    let free: Vec<usize> = (1..y.len() - 1).filter(|&k| k != j0).collect();
    let ranges: Vec<(f64, f64)> = free
        .iter()
        .map(|&k| if y[k] < 0.0 { (dom.left_value, dom.left_value * y[k] / dom.lower) } else { (dom.right_value * y[k] / dom.upper, dom.right_value) })
        .collect();
    let step_v = ranges.iter().map(|(lo, hi)| (hi - lo) / res_v as f64).fold(0.0, f64::max);

    let split = sign_split(prospect, x);
    let probs = prospect.probs();
    let (minus, step_minus) = if split.m > 0 { weighting_candidates(&model.ball_minus, res_psi)? } else { (vec![model.ball_minus.center.clone()], 0.0) };
    let (plus, step_plus) = if split.n_plus_1 > 0 { weighting_candidates(&model.ball_plus, res_psi)? } else { (vec![model.ball_plus.center.clone()], 0.0) };
    let pi_minus: Vec<Vec<f64>> = minus.iter().map(|w| pi_weights(&split, probs, w, &model.ball_plus.center).pi[..split.m].to_vec()).collect();
    let pi_plus: Vec<Vec<f64>> = plus.iter().map(|w| pi_weights(&split, probs, &model.ball_minus.center, w).pi[split.m..].to_vec()).collect();

    let mut best = f64::NEG_INFINITY;
    let mut candidates = 0;
    let mut feasible = 0;
    let mut idx = vec![0usize; free.len()];
    let mut u = vec![0.0; y.len()];
    u[0] = dom.left_value;
    u[y.len() - 1] = dom.right_value;
    'outer: loop {
        candidates += 1;
        for (c, &k) in free.iter().enumerate() {
            let (lo, hi) = ranges[c];
            u[k] = if idx[c] == res_v { hi } else { lo + (hi - lo) * idx[c] as f64 / res_v as f64 };
        }
        if slopes_admissible(&y, &u, j0) {
            let v = PLValueFunction::from_values(&y, &u)?;
            if model.max_violation(&v)? <= FEASIBILITY_TOL {
                feasible += 1;
                let z: Vec<f64> = split.shifted.iter().map(|&s| v.eval_unchecked(s)).collect();
                let side =
                    |pis: &[Vec<f64>], zs: &[f64]| pis.iter().map(|pi| pi.iter().zip(zs).map(|(p, z)| p * z).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max);
                let neg = if split.m > 0 { side(&pi_minus, &z[..split.m]) } else { 0.0 };
                let pos = if split.n_plus_1 > 0 { side(&pi_plus, &z[split.m..]) } else { 0.0 };
                best = best.max(neg + pos);
            }
        }
        let mut c = 0;
        loop {
            if c == free.len() {
                break 'outer;
            }
            idx[c] += 1;
            if idx[c] <= res_v {
                break;
            }
            idx[c] = 0;
            c += 1;
        }
    }
    if feasible == 0 || minus.is_empty() || plus.is_empty() {
        return Err(Error::OracleInfeasible);
    }
    let v_max = dom.left_value.abs().max(dom.right_value.abs());
    let lead = |ball: &WeightingBall| {
        let w = ball.center.piece_widths();
        w[..w.len() - 1].iter().sum::<f64>()
    };
    let bound = BOUND_CELLS * (2.0 * step_v + 2.0 * v_max * (step_minus * lead(&model.ball_minus) + step_plus * lead(&model.ball_plus)));
    Ok(OracleValue { value: best, bound, value_candidates: candidates, feasible_values: feasible, minus_candidates: minus.len(), plus_candidates: plus.len() })
}

/// `(max_t ρ_t, root of x ↦ max_t E_t[v_t(ξ - x)])`, two routes to the
/// robust shortfall risk of a finite preference set.
pub fn oracle_robust_equivalence(tuples: &[WorstCaseTuple], prospect: &Prospect, cfg: &BisectionConfig) -> Result<(f64, f64)> {
    Ok((worst_gsr_finite(tuples, prospect, cfg)?, robust_constraint_root(tuples, prospect, cfg)?))
}

/// Smallest point of a uniform grid over `[min ξ, max ξ]` with spacing at
/// most `grid_res` where the distorted expectation is non-positive.
pub fn oracle_gsr_grid(v: &PLValueFunction, w_minus: &PLWeighting, w_plus: &PLWeighting, prospect: &Prospect, grid_res: f64) -> Result<f64> {
    if !(grid_res > 0.0) {
        return Err(Error::InvalidConfig(format!("grid resolution must be positive, got {grid_res}")));
    }
    let (lo, hi) = (prospect.min(), prospect.max());
    let n = ((hi - lo) / grid_res).ceil().max(1.0) as usize;
    for k in 0..=n {
        let x = if k == n { hi } else { lo + (hi - lo) * k as f64 / n as f64 };
        if distorted_expectation(v, w_minus, w_plus, prospect, x)? <= 0.0 {
            return Ok(x);
        }
    }
    Ok(hi)
}

/// A small model, prospect and level for oracle comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TinyInstance {
    pub model: AmbiguityModel,
    pub prospect: Prospect,
    pub x: f64,
}

/// Draws a tiny instance whose grids stay within the oracle limits.
///
/// Probabilities are `(1/2, 1/2)` or `(1/4, 1/2, 1/4)`, so cumulative and
/// tail probabilities lie on the weighting grid `{0, 1/2, 1}` or
/// `{0, 1/4, 3/4, 1}`. Balls are centered at the reference weighting on that
/// grid. Two-outcome instances may carry one utility-split record, either
/// over the whole domain or between the two shifted outcomes, answered by
/// the reference value function.
pub fn random_tiny_instance(rng: &mut impl Rng) -> Result<TinyInstance> {
    let truth = ReferenceFunctions::default();
    let domain = ValueDomain::new(-0.5, 0.5, truth.value(-0.5), truth.value(0.5))?;
    let two = rng.gen_bool(0.5);
    let (probs, grid): (Vec<f64>, Vec<f64>) = if two { (vec![0.5, 0.5], vec![0.0, 0.5, 1.0]) } else { (vec![0.25, 0.5, 0.25], vec![0.0, 0.25, 0.75, 1.0]) };
    let outcomes: Vec<f64> = loop {
        let mut o: Vec<f64> = (0..probs.len()).map(|_| (rng.gen_range(-0.2..0.2) * 1000.0f64).round() / 1000.0).collect();
        o.sort_by(f64::total_cmp);
        if o.windows(2).all(|w| w[1] - w[0] > 0.01) {
            break o;
        }
    };
    let prospect = Prospect::canonicalize(&outcomes, &probs)?;
    let x = (rng.gen_range(prospect.min()..=prospect.max()) * 1000.0f64).round() / 1000.0;
    let center = PLWeighting::interpolate(|p| truth.weighting(p), &grid, ShapeCheck::Skip)?;
    let radius = [0.0, 0.02, 0.05, 0.1][rng.gen_range(0..4)];
    let ball = WeightingBall::new(center.clone(), radius, Envelope::default())?;

    let mut pairwise = Vec::new();
    if two && rng.gen_bool(0.6) {
        let shifted: Vec<f64> = outcomes.iter().map(|o| o - x).collect();
        let (r1, r3) = if rng.gen_bool(0.5) || shifted.iter().any(|z| z.abs() < 1e-9) { (domain.lower, domain.upper) } else { (shifted[0], shifted[1]) };
        let r2 = 0.5 * (r1 + r3);
        let weight = rng.gen_range(0.2..0.8);
        let p = truth.weighting_inverse(weight);
        let ratio = (truth.value(r2) - truth.value(r1)) / (truth.value(r3) - truth.value(r1));
        pairwise.push(PairwiseRecord::utility_split(r1, r3, p, weight, ratio > weight)?);
    }
    let model = AmbiguityModel::new(pairwise, Vec::new(), (center.clone(), center), domain, ball.clone(), ball)?;
    Ok(TinyInstance { model, prospect, x })
}

/// [`random_tiny_instance`] from a ChaCha stream of `seed`.
pub fn seeded_tiny_instance(seed: u64) -> Result<TinyInstance> {
    random_tiny_instance(&mut ChaCha20Rng::seed_from_u64(seed))
}

/// S-shaped value function on `[lower, upper]` with one to three pieces on
/// each side of zero and slopes drawn from `[0.2, 3]`.
pub fn random_value_function(rng: &mut impl Rng, lower: f64, upper: f64) -> Result<PLValueFunction> {
    let side = |rng: &mut _, end: f64| -> Vec<f64> {
        let n = Rng::gen_range(rng, 0..=2);
        let mut pts: Vec<f64> = (0..n).map(|_| end * Rng::gen_range(rng, 0.05..0.95)).collect();
        pts.push(end);
        pts.sort_by(|a: &f64, b| a.abs().total_cmp(&b.abs()));
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        pts
    };
    let losses = side(rng, lower);
    let gains = side(rng, upper);
    // Steepest next to zero on both sides, flattening outwards.
    let mut draw_slopes = |n: usize| -> Vec<f64> {
        let mut s: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..3.0)).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    };
    let loss_slopes = draw_slopes(losses.len());
    let gain_slopes = draw_slopes(gains.len());
    let mut ys = vec![0.0];
    let mut vs = vec![0.0];
    let (mut y, mut v) = (0.0, 0.0);
    for (&p, &a) in losses.iter().zip(&loss_slopes) {
        v -= a * (y - p);
        y = p;
        ys.insert(0, p);
        vs.insert(0, v);
    }
    let (mut y, mut v) = (0.0, 0.0);
    for (&p, &a) in gains.iter().zip(&gain_slopes) {
        v += a * (p - y);
        y = p;
        ys.push(p);
        vs.push(v);
    }
    PLValueFunction::from_values(&ys, &vs)
}

/// Inverse-S weighting on a random grid of two to five pieces.
pub fn random_weighting(rng: &mut impl Rng) -> Result<PLWeighting> {
    let n = rng.gen_range(2..=5);
    let mut t: Vec<f64> = (0..n - 1).map(|_| (rng.gen_range(0.05..0.95) * 100.0f64).round() / 100.0).collect();
    t.push(0.0);
    t.push(1.0);
    t.sort_by(f64::total_cmp);
    t.dedup();
    let pieces = t.len() - 1;
    let k = rng.gen_range(0..=pieces);
    let mut head: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..3.0)).collect();
    head.sort_by(|a, b| b.total_cmp(a));
    let mut tail: Vec<f64> = (k..pieces).map(|_| rng.gen_range(0.2..3.0)).collect();
    tail.sort_by(f64::total_cmp);
    let mut slopes = head;
    slopes.extend(tail);
    let mass: f64 = slopes.iter().zip(t.windows(2)).map(|(s, w)| s * (w[1] - w[0])).sum();
    let slopes: Vec<f64> = slopes.iter().map(|s| s / mass).collect();
    PLWeighting::with_tolerance(t, slopes, k, 1e-9)
}

/// Prospect with one to `max_len` outcomes in `[-half_width, half_width]`.
pub fn random_prospect(rng: &mut impl Rng, max_len: usize, half_width: f64) -> Result<Prospect> {
    let n = rng.gen_range(1..=max_len);
    let outcomes: Vec<f64> = (0..n).map(|_| rng.gen_range(-half_width..=half_width)).collect();
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
    Prospect::canonicalize(&outcomes, &probs)
}

/// A random tuple for prospects whose shifted outcomes stay in `[-1, 1]`.
pub fn random_tuple(rng: &mut impl Rng) -> Result<WorstCaseTuple> {
    Ok(WorstCaseTuple { value: random_value_function(rng, -1.0, 1.0)?, w_minus: random_weighting(rng)?, w_plus: random_weighting(rng)? })
}
