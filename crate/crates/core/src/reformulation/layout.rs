use serde::{Deserialize, Serialize};

use crate::ambiguity::{build_breakpoint_grid, AmbiguityModel, BreakpointGrid, WeightingBall};
use crate::functions::{union_grid, PLWeighting, EPS_POS};
use crate::prospect::{Prospect, SignSplit};
use crate::{Error, Result};

/// Cumulative probabilities must sit this close to a weighting breakpoint.
pub const WEIGHT_GRID_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Losses, weighted by `w⁻` over cumulative probabilities.
    Minus,
    /// Gains, weighted by `w⁺` over tail probabilities.
    Plus,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Minus => "minus",
            Side::Plus => "plus",
        }
    }
}

/// Variables and data for one side's weighting slices.
///
/// Slice `l` owns the probability interval `[t_l, t_{l+1})` of the ball
/// center's grid and carries a scaled copy `(ψ_l a, ψ_l b)` of the value
/// function.
#[derive(Debug, Clone, PartialEq)]
pub struct SideLayout {
    pub side: Side,
    pub t: Vec<f64>,
    pub widths: Vec<f64>,
    pub center: Vec<f64>,
    /// `∫ g̃` over each slice.
    pub masses: Vec<f64>,
    pub radius: f64,
    pub p_star_index: usize,
    /// Shifted-outcome index whose probability interval contains the slice,
    /// or `None` when the slice carries no objective mass.
    pub slice_outcome: Vec<Option<usize>>,
    pub a_off: usize,
    pub b_off: usize,
    pub psi_off: usize,
    pub eta_off: usize,
    pub theta_off: usize,
    pieces: usize,
}

impl SideLayout {
    pub fn n_slices(&self) -> usize {
        self.t.len() - 1
    }

    pub fn a(&self, l: usize, j: usize) -> usize {
        self.a_off + l * self.pieces + j
    }

    pub fn b(&self, l: usize, j: usize) -> usize {
        self.b_off + l * self.pieces + j
    }

    /// `ã_j` of slice `l` from a primal vector whose slope columns hold the
    /// excess over `ε ψ_l`.
    pub fn slope(&self, primal: &[f64], l: usize, j: usize) -> f64 {
        primal[self.a(l, j)] + EPS_POS * primal[self.psi(l)]
    }

    pub fn psi(&self, l: usize) -> usize {
        self.psi_off + l
    }

    pub fn eta(&self, l: usize) -> usize {
        self.eta_off + l
    }

    pub fn theta(&self, l: usize) -> usize {
        self.theta_off + l
    }

    pub fn n_vars(&self) -> usize {
        2 * self.pieces * self.n_slices() + 3 * self.n_slices()
    }

    /// The same side with only `(ψ, η, θ)`, numbered from zero.
    pub(crate) fn weighting_only(&self) -> SideLayout {
        let n = self.n_slices();
        SideLayout { a_off: 0, b_off: 0, psi_off: 0, eta_off: n, theta_off: 2 * n, pieces: 0, ..self.clone() }
    }
}

/// Index bookkeeping for the worst-case program at one `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub x: f64,
    pub grid: BreakpointGrid,
    pub split: SignSplit,
    pub minus: Option<SideLayout>,
    pub plus: Option<SideLayout>,
    pub n_vars: usize,
    /// Centers used as the weighting of an absent side.
    pub center_minus: PLWeighting,
    pub center_plus: PLWeighting,
}

impl Layout {
    pub fn build(model: &AmbiguityModel, prospect: &Prospect, x: f64) -> Result<Self> {
        let grid = build_breakpoint_grid(model, prospect, x)?;
        let split = prospect.sign_split(x);
        let pieces = grid.n_pieces();
        let q = prospect.cumulative();
        let n = prospect.len();
        let m = split.m;
        let mut off = 0;

        let minus = if m > 0 {
            // Outcome i < m owns [q_{i-1}, q_i].
            let intervals: Vec<(usize, f64, f64)> = (0..m).map(|i| (i, if i == 0 { 0.0 } else { q[i - 1] }, q[i])).collect();
            let s = side_layout(Side::Minus, &model.ball_minus, &intervals, pieces, off)?;
            off += s.n_vars();
            Some(s)
        } else {
            None
        };
        let plus = if split.n_plus_1 > 0 {
            // Outcome i >= m owns [1 - q_i, 1 - q_{i-1}]; outcomes at zero add nothing.
            let intervals: Vec<(usize, f64, f64)> =
                (m..n).filter(|&i| split.shifted[i] > 0.0).map(|i| (i, 1.0 - q[i], if i == 0 { 1.0 } else { 1.0 - q[i - 1] })).collect();
            let s = side_layout(Side::Plus, &model.ball_plus, &intervals, pieces, off)?;
            off += s.n_vars();
            Some(s)
        } else {
            None
        };
        Ok(Self { x, grid, split, minus, plus, n_vars: off, center_minus: model.ball_minus.center.clone(), center_plus: model.ball_plus.center.clone() })
    }

    pub fn sides(&self) -> impl Iterator<Item = &SideLayout> {
        self.minus.iter().chain(self.plus.iter())
    }
}

fn snap(t: &[f64], q: f64, side: Side) -> Result<usize> {
    let k = t.partition_point(|&b| b < q - WEIGHT_GRID_TOL);
    if k < t.len() && (t[k] - q).abs() <= WEIGHT_GRID_TOL {
        Ok(k)
    } else {
        Err(Error::WeightingGridTooCoarse { side: side.as_str(), point: q })
    }
}

fn side_layout(side: Side, ball: &WeightingBall, intervals: &[(usize, f64, f64)], pieces: usize, off: usize) -> Result<SideLayout> {
    let t = ball.center.breakpoints().to_vec();
    let n_slices = t.len() - 1;
    let mut slice_outcome = vec![None; n_slices];
    for &(i, lo, hi) in intervals {
        let (k0, k1) = (snap(&t, lo, side)?, snap(&t, hi, side)?);
        for slot in &mut slice_outcome[k0..k1] {
            *slot = Some(i);
        }
    }
    let a_off = off;
    let b_off = a_off + pieces * n_slices;
    let psi_off = b_off + pieces * n_slices;
    Ok(SideLayout {
        side,
        widths: t.windows(2).map(|w| w[1] - w[0]).collect(),
        center: ball.center.slopes().to_vec(),
        masses: ball.piece_masses()?,
        radius: ball.radius,
        p_star_index: ball.center.p_star_index(),
        slice_outcome,
        a_off,
        b_off,
        psi_off,
        eta_off: psi_off + n_slices,
        theta_off: psi_off + 2 * n_slices,
        pieces,
        t,
    })
}

/// The model with both ball centers regridded so that every cumulative and
/// tail probability of `prospect` is a weighting breakpoint.
pub fn refine_for_prospect(model: &AmbiguityModel, prospect: &Prospect) -> Result<AmbiguityModel> {
    let q = prospect.cumulative();
    let mut extra: Vec<f64> = Vec::with_capacity(2 * q.len());
    for &qi in &q {
        extra.push(qi);
        extra.push(1.0 - qi);
    }
    let refine = |ball: &WeightingBall| -> Result<WeightingBall> {
        let t = ball.center.breakpoints();
        let mut fresh: Vec<f64> = extra.iter().copied().filter(|&p| p > 0.0 && p < 1.0 && !t.iter().any(|&b| (b - p).abs() <= WEIGHT_GRID_TOL)).collect();
        fresh.sort_by(f64::total_cmp);
        fresh.dedup_by(|a, b| (*a - *b).abs() <= WEIGHT_GRID_TOL);
        let grid = union_grid(t, &fresh);
        WeightingBall::new(ball.center.regrid(&grid)?, ball.radius, ball.envelope.clone())
    };
    let mut out = model.clone();
    out.ball_minus = refine(&model.ball_minus)?;
    out.ball_plus = refine(&model.ball_plus)?;
    Ok(out)
}
