use prgsr_lp::{LpProblem, RowKind, Sense};

use crate::ambiguity::{ce_constraint_coeffs, phi_integrals, AmbiguityModel, CeBound};
use crate::functions::EPS_POS;
use crate::prospect::Prospect;
use crate::Result;

use super::layout::{Layout, SideLayout};

/// Constraint families of the worst-case program, used as row tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowFamily {
    /// Slopes do not increase before the inflection breakpoint.
    WeightingDecreasing,
    /// Slopes do not decrease from the inflection breakpoint on.
    WeightingIncreasing,
    /// `Σ ψ_l Δt_l = 1`.
    WeightingNormalization,
    /// `Σ (η_l + θ_l) ∫g̃ <= r`.
    BallRadius,
    /// `ψ_l - ψ⁰_l + η_l - θ_l = 0`.
    BallDual,
    /// `ψ_l >= ε`.
    WeightingFloor,
    Pairwise,
    Continuity,
    ConvexLosses,
    ConcaveGains,
    AnchorZero,
    AnchorLeft,
    AnchorRight,
    CeUpper,
    CeLower,
}

impl RowFamily {
    pub const ALL: [RowFamily; 15] = [
        RowFamily::WeightingDecreasing,
        RowFamily::WeightingIncreasing,
        RowFamily::WeightingNormalization,
        RowFamily::BallRadius,
        RowFamily::BallDual,
        RowFamily::WeightingFloor,
        RowFamily::Pairwise,
        RowFamily::Continuity,
        RowFamily::ConvexLosses,
        RowFamily::ConcaveGains,
        RowFamily::AnchorZero,
        RowFamily::AnchorLeft,
        RowFamily::AnchorRight,
        RowFamily::CeUpper,
        RowFamily::CeLower,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RowFamily::WeightingDecreasing => "weighting_decreasing",
            RowFamily::WeightingIncreasing => "weighting_increasing",
            RowFamily::WeightingNormalization => "weighting_normalization",
            RowFamily::BallRadius => "ball_radius",
            RowFamily::BallDual => "ball_dual",
            RowFamily::WeightingFloor => "weighting_floor",
            RowFamily::Pairwise => "pairwise",
            RowFamily::Continuity => "continuity",
            RowFamily::ConvexLosses => "convex_losses",
            RowFamily::ConcaveGains => "concave_gains",
            RowFamily::AnchorZero => "anchor_zero",
            RowFamily::AnchorLeft => "anchor_left",
            RowFamily::AnchorRight => "anchor_right",
            RowFamily::CeUpper => "ce_upper",
            RowFamily::CeLower => "ce_lower",
        }
    }

    /// Family encoded in a row label of the form `side:family[:slice]`.
    pub fn of_label(label: &str) -> Option<RowFamily> {
        let name = label.split(':').nth(1)?;
        RowFamily::ALL.into_iter().find(|f| f.as_str() == name)
    }
}

fn label(side: &SideLayout, family: RowFamily) -> String {
    format!("{}:{}", side.side.as_str(), family.as_str())
}

/// Weighting-slope rows for one side: inverse-S ordering, normalization,
/// the dual form of the ball constraint, and the positivity floor.
pub(crate) fn add_weighting_rows(p: &mut LpProblem, s: &SideLayout) {
    let n = s.n_slices();
    let k = s.p_star_index;
    for l in 0..n.saturating_sub(1) {
        if l + 1 < k {
            p.add_row(label(s, RowFamily::WeightingDecreasing), [(s.psi(l + 1), 1.0), (s.psi(l), -1.0)], RowKind::Le, 0.0);
        } else if l >= k {
            p.add_row(label(s, RowFamily::WeightingIncreasing), [(s.psi(l), 1.0), (s.psi(l + 1), -1.0)], RowKind::Le, 0.0);
        }
    }
    p.add_row(label(s, RowFamily::WeightingNormalization), (0..n).map(|l| (s.psi(l), s.widths[l])), RowKind::Eq, 1.0);
    p.add_row(label(s, RowFamily::BallRadius), (0..n).flat_map(|l| [(s.eta(l), s.masses[l]), (s.theta(l), s.masses[l])]), RowKind::Le, s.radius);
    for l in 0..n {
        p.add_row(label(s, RowFamily::BallDual), [(s.psi(l), 1.0), (s.eta(l), 1.0), (s.theta(l), -1.0)], RowKind::Eq, s.center[l]);
        p.add_row(label(s, RowFamily::WeightingFloor), [(s.psi(l), 1.0)], RowKind::Ge, EPS_POS);
    }
}

/// The linear program whose optimum is the worst-case expected value at `x`.
#[derive(Debug, Clone)]
pub struct LinearizedWorstCaseLP {
    pub problem: LpProblem,
    pub layout: Layout,
}

impl LinearizedWorstCaseLP {
    /// Families with at least one row, in [`RowFamily::ALL`] order.
    pub fn families_present(&self) -> Vec<RowFamily> {
        RowFamily::ALL.into_iter().filter(|f| self.problem.rows.iter().any(|r| RowFamily::of_label(&r.label) == Some(*f))).collect()
    }
}

/// Builds the program over `(ã^l, b̃^l, ψ, η, θ)` for both sides.
///
/// The floor `ã_j >= ε ψ_l` is imposed by letting column `a(l, j)` hold the
/// excess `ã_j - ε ψ_l >= 0`; every coefficient on `ã_j` is mirrored onto
/// `ψ_l` with weight `ε`. Use [`SideLayout::slope`] to read `ã_j` back.
pub fn assemble(model: &AmbiguityModel, prospect: &Prospect, x: f64) -> Result<LinearizedWorstCaseLP> {
    let layout = Layout::build(model, prospect, x)?;
    let grid = &layout.grid;
    let y = grid.points();
    let pieces = grid.n_pieces();
    let j0 = grid.zero_index();
    let dom = &model.domain;

    let phis: Vec<Vec<f64>> = model.pairwise.iter().map(|r| phi_integrals(r, grid)).collect::<Result<_>>()?;
    let mut ce_forms = Vec::with_capacity(2 * model.ce.len());
    for rec in &model.ce {
        ce_forms.push((RowFamily::CeUpper, ce_constraint_coeffs(rec, grid, &model.ce_weightings, CeBound::Upper)?));
        ce_forms.push((RowFamily::CeLower, ce_constraint_coeffs(rec, grid, &model.ce_weightings, CeBound::Lower)?));
    }

    let mut p = LpProblem::new(Sense::Maximize, layout.n_vars);
    for s in layout.sides() {
        for l in 0..s.n_slices() {
            for j in 0..pieces {
                p.set_free(s.b(l, j));
            }
        }
    }

    for s in layout.sides() {
        add_weighting_rows(&mut p, s);
        for l in 0..s.n_slices() {
            let tag = |f: RowFamily| format!("{}:{}:{l}", s.side.as_str(), f.as_str());
            // Coefficient `c` on `ã_j` in the excess columns.
            let slope = |j: usize, c: f64| [(s.a(l, j), c), (s.psi(l), c * EPS_POS)];
            let row = |p: &mut LpProblem, family: RowFamily, slopes: Vec<(usize, f64)>, rest: Vec<(usize, f64)>, kind: RowKind| {
                let coeffs = slopes.into_iter().flat_map(|(j, c)| slope(j, c)).chain(rest);
                p.add_row(tag(family), coeffs, kind, 0.0);
            };
            if let Some(i) = s.slice_outcome[l] {
                let z = layout.split.shifted[i];
                let j = grid.piece_of(z);
                for (k, c) in slope(j, s.widths[l] * z) {
                    p.objective[k] += c;
                }
                p.objective[s.b(l, j)] += s.widths[l];
            }
            for phi in &phis {
                row(&mut p, RowFamily::Pairwise, phi.iter().copied().enumerate().collect(), Vec::new(), RowKind::Le);
            }
            for k in 1..pieces {
                row(&mut p, RowFamily::Continuity, vec![(k - 1, y[k]), (k, -y[k])], vec![(s.b(l, k - 1), 1.0), (s.b(l, k), -1.0)], RowKind::Eq);
            }
            for j in 0..pieces.saturating_sub(1) {
                if j + 1 < j0 {
                    row(&mut p, RowFamily::ConvexLosses, vec![(j, 1.0), (j + 1, -1.0)], Vec::new(), RowKind::Le);
                } else if j >= j0 {
                    row(&mut p, RowFamily::ConcaveGains, vec![(j + 1, 1.0), (j, -1.0)], Vec::new(), RowKind::Le);
                }
            }
            p.add_row(tag(RowFamily::AnchorZero), [(s.b(l, j0), 1.0)], RowKind::Eq, 0.0);
            row(&mut p, RowFamily::AnchorLeft, vec![(0, y[0])], vec![(s.b(l, 0), 1.0), (s.psi(l), -dom.left_value)], RowKind::Eq);
            let last = pieces - 1;
            row(&mut p, RowFamily::AnchorRight, vec![(last, y[pieces])], vec![(s.b(l, last), 1.0), (s.psi(l), -dom.right_value)], RowKind::Eq);
            for (family, form) in &ce_forms {
                let kind = if *family == RowFamily::CeUpper { RowKind::Le } else { RowKind::Ge };
                let b = (0..pieces).map(|j| (s.b(l, j), form.intercept_coeffs[j])).collect();
                row(&mut p, *family, form.slope_coeffs.iter().copied().enumerate().collect(), b, kind);
            }
        }
    }
    Ok(LinearizedWorstCaseLP { problem: p, layout })
}
