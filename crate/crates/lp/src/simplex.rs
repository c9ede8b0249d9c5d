use crate::problem::{LpProblem, RowKind, Sense};
use std::collections::HashMap;

/// Outcome class of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// The iteration cap was hit before optimality could be proven.
    IterationLimit,
    /// The final basis reproduced the rows too poorly to be trusted.
    NumericFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value in the problem's own sense (NaN unless optimal).
    pub objective: f64,
    /// Primal values (empty unless optimal).
    pub x: Vec<f64>,
    /// Total simplex pivots spent on this objective, phase one included.
    pub iterations: usize,
}

impl LpSolution {
    fn failed(status: LpStatus, iterations: usize) -> Self {
        Self { status, objective: f64::NAN, x: Vec::new(), iterations }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Anything able to solve an [`LpProblem`].
pub trait LpSolver: Sync {
    fn solve(&self, problem: &LpProblem) -> LpSolution;

    /// Solves the same feasible region for several objectives, each a dense
    /// coefficient vector in the problem's sense. The default re-solves from
    /// scratch; implementations may share work between objectives.
    fn solve_many(&self, problem: &LpProblem, objectives: &[Vec<f64>]) -> Vec<LpSolution> {
        objectives
            .iter()
            .map(|c| {
                let mut p = problem.clone();
                p.objective.clone_from(c);
                self.solve(&p)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Smallest pivot magnitude accepted (absolute).
    pub pivot_tol: f64,
    /// Pivot thresholds of further attempts, tried in order for objectives
    /// that earlier attempts could not solve to optimality. Entries equal to
    /// an earlier threshold are skipped.
    pub retry_pivot_tols: [f64; 3],
    /// Ratio tests first look only at entries above this magnitude and fall
    /// back to [`SimplexOptions::pivot_tol`] when none qualifies.
    pub stable_pivot_tol: f64,
    /// A reduced cost must exceed this to enter the basis.
    pub optimality_tol: f64,
    /// Largest phase-one infeasibility still counted as feasible.
    pub feasibility_tol: f64,
    /// Dantzig pricing switches to Bland's rule after
    /// `bland_factor * (rows + cols)` pivots within a phase.
    pub bland_factor: usize,
    /// Hard cap on pivots per phase: `limit_factor * (rows + cols)`.
    pub limit_factor: usize,
    /// Times a phase may rebuild its tableau from the original rows and
    /// resume pivoting.
    pub max_reinversions: usize,
    /// Largest relative row violation of an optimal point before the
    /// result is reported as a numeric failure.
    pub acceptance_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            pivot_tol: 1e-5,
            retry_pivot_tols: [1e-7, 1e-6, 1e-9],
            stable_pivot_tol: 1e-7,
            optimality_tol: 1e-9,
            feasibility_tol: 1e-9,
            bland_factor: 10,
            limit_factor: 200,
            max_reinversions: 3,
            acceptance_tol: 1e-7,
        }
    }
}

/// Two-phase primal simplex on a dense tableau.
#[derive(Debug, Clone, Copy, Default)]
pub struct DenseSimplex {
    pub options: SimplexOptions,
}

impl DenseSimplex {
    pub fn new(options: SimplexOptions) -> Self {
        Self { options }
    }
}

impl LpSolver for DenseSimplex {
    fn solve(&self, problem: &LpProblem) -> LpSolution {
        self.solve_many(problem, std::slice::from_ref(&problem.objective)).pop().expect("one objective in, one solution out")
    }

    fn solve_many(&self, problem: &LpProblem, objectives: &[Vec<f64>]) -> Vec<LpSolution> {
        let mut out = self.attempt(problem, objectives, self.options);
        let mut tried = vec![self.options.pivot_tol];
        for &tol in &self.options.retry_pivot_tols {
            if tried.contains(&tol) || out.iter().all(LpSolution::is_optimal) {
                continue;
            }
            tried.push(tol);
            let retry = SimplexOptions { pivot_tol: tol, ..self.options };
            let failed: Vec<usize> = (0..out.len()).filter(|&k| !out[k].is_optimal()).collect();
            let again: Vec<Vec<f64>> = failed.iter().map(|&k| objectives[k].clone()).collect();
            for (k, sol) in failed.into_iter().zip(self.attempt(problem, &again, retry)) {
                let spent = out[k].iterations + sol.iterations;
                if sol.is_optimal() || sol.status != LpStatus::NumericFailure {
                    out[k] = sol;
                }
                out[k].iterations = spent;
            }
        }
        out
    }
}

impl DenseSimplex {
    fn attempt(&self, problem: &LpProblem, objectives: &[Vec<f64>], options: SimplexOptions) -> Vec<LpSolution> {
        if problem.validate().is_err() {
            return objectives.iter().map(|_| LpSolution::failed(LpStatus::NumericFailure, 0)).collect();
        }
        let std = match StandardForm::build(problem) {
            Some(s) => s,
            None => return objectives.iter().map(|_| LpSolution::failed(LpStatus::Infeasible, 0)).collect(),
        };
        let mut tab = Tableau::new(&std, options);
        let phase_one = tab.phase_one(&std);
        if phase_one.status != LpStatus::Optimal {
            return objectives.iter().map(|_| LpSolution::failed(phase_one.status, phase_one.iterations)).collect();
        }
        let mut out = Vec::with_capacity(objectives.len());
        let mut spent = phase_one.iterations;
        for c in objectives {
            let sign = if problem.sense == Sense::Maximize { 1.0 } else { -1.0 };
            let cost = std.column_costs(c, sign);
            let run = tab.phase_two(&std, &cost);
            spent += run.iterations;
            if run.status != LpStatus::Optimal {
                out.push(LpSolution::failed(run.status, spent));
                continue;
            }
            let x = std.recover(&tab.column_values());
            let violation = problem.max_row_violation(&x).max(problem.max_bound_violation(&x));
            if !violation.is_finite() || violation > options.acceptance_tol {
                out.push(LpSolution::failed(LpStatus::NumericFailure, spent));
                continue;
            }
            let objective = c.iter().zip(&x).map(|(a, b)| a * b).sum();
            out.push(LpSolution { status: LpStatus::Optimal, objective, x, iterations: spent });
            spent = 0;
        }
        out
    }
}

/// How an original variable is expressed through non-negative columns.
#[derive(Debug, Clone, Copy)]
enum ColMap {
    Fixed(f64),
    Shifted { col: usize, lower: f64 },
    Mirrored { col: usize, upper: f64 },
    Split { pos: usize, neg: usize },
}

struct StdRow {
    coeffs: Vec<(usize, f64)>,
    kind: RowKind,
    rhs: f64,
}

/// `A s (<=,=,>=) b`, `s >= 0`, rows scaled to unit max-norm and `b >= 0`,
/// with repeated and opposite rows merged.
struct StandardForm {
    maps: Vec<ColMap>,
    n_cols: usize,
    rows: Vec<StdRow>,
}

impl StandardForm {
    /// Returns `None` when an all-zero row is infeasible on its own.
    fn build(p: &LpProblem) -> Option<Self> {
        let mut maps = Vec::with_capacity(p.n_vars());
        let mut n_cols = 0;
        let mut bound_rows = Vec::new();
        for (&lo, &hi) in p.lower.iter().zip(&p.upper) {
            let map = if lo == hi {
                ColMap::Fixed(lo)
            } else if lo.is_finite() {
                let col = n_cols;
                n_cols += 1;
                if hi.is_finite() {
                    bound_rows.push(StdRow { coeffs: vec![(col, 1.0)], kind: RowKind::Le, rhs: hi - lo });
                }
                ColMap::Shifted { col, lower: lo }
            } else if hi.is_finite() {
                let col = n_cols;
                n_cols += 1;
                ColMap::Mirrored { col, upper: hi }
            } else {
                let pos = n_cols;
                n_cols += 2;
                ColMap::Split { pos, neg: pos + 1 }
            };
            maps.push(map);
        }

        let mut rows = Vec::with_capacity(p.n_rows() + bound_rows.len());
        for row in &p.rows {
            let mut rhs = row.rhs;
            let mut coeffs = Vec::with_capacity(row.coeffs.len() + 1);
            for &(j, c) in &row.coeffs {
                match maps[j] {
                    ColMap::Fixed(v) => rhs -= c * v,
                    ColMap::Shifted { col, lower } => {
                        rhs -= c * lower;
                        coeffs.push((col, c));
                    }
                    ColMap::Mirrored { col, upper } => {
                        rhs -= c * upper;
                        coeffs.push((col, -c));
                    }
                    ColMap::Split { pos, neg } => {
                        coeffs.push((pos, c));
                        coeffs.push((neg, -c));
                    }
                }
            }
            rows.push(StdRow { coeffs, kind: row.kind, rhs });
        }
        rows.extend(bound_rows);

        // Scale each row to unit max-norm with a positive leading coefficient
        // so that repeated and opposite rows share a key; each key then keeps
        // one interval `lo <= a s <= hi`.
        let mut index: HashMap<Vec<(usize, u64)>, usize> = HashMap::new();
        let mut merged: Vec<(Vec<(usize, f64)>, f64, f64)> = Vec::new();
        for mut row in rows {
            row.coeffs.sort_by_key(|&(j, _)| j);
            row.coeffs.dedup_by(|b, a| {
                if a.0 == b.0 {
                    a.1 += b.1;
                    true
                } else {
                    false
                }
            });
            row.coeffs.retain(|&(_, c)| c != 0.0);
            let Some(&(_, lead)) = row.coeffs.first() else {
                let tol = 1e-9 * (1.0 + row.rhs.abs());
                let ok = match row.kind {
                    RowKind::Le => row.rhs >= -tol,
                    RowKind::Ge => row.rhs <= tol,
                    RowKind::Eq => row.rhs.abs() <= tol,
                };
                if !ok {
                    return None;
                }
                continue;
            };
            let max = row.coeffs.iter().map(|&(_, c)| c.abs()).fold(0.0, f64::max);
            let scale = max.copysign(lead);
            for (_, c) in &mut row.coeffs {
                *c /= scale;
            }
            let rhs = row.rhs / scale;
            let kind = if scale < 0.0 {
                match row.kind {
                    RowKind::Le => RowKind::Ge,
                    RowKind::Ge => RowKind::Le,
                    RowKind::Eq => RowKind::Eq,
                }
            } else {
                row.kind
            };
            let (lo, hi) = match kind {
                RowKind::Le => (f64::NEG_INFINITY, rhs),
                RowKind::Ge => (rhs, f64::INFINITY),
                RowKind::Eq => (rhs, rhs),
            };
            let key: Vec<(usize, u64)> = row.coeffs.iter().map(|&(j, c)| (j, c.to_bits())).collect();
            match index.get(&key) {
                Some(&k) => {
                    let entry = &mut merged[k];
                    entry.1 = entry.1.max(lo);
                    entry.2 = entry.2.min(hi);
                }
                None => {
                    index.insert(key, merged.len());
                    merged.push((row.coeffs, lo, hi));
                }
            }
        }

        let mut kept = Vec::with_capacity(merged.len());
        for (coeffs, lo, hi) in merged {
            let tol = 1e-12 * (1.0 + lo.abs().min(hi.abs()));
            if lo > hi + tol {
                return None;
            }
            if hi - lo <= tol {
                kept.push(StdRow { coeffs, kind: RowKind::Eq, rhs: 0.5 * (lo + hi) });
                continue;
            }
            if hi.is_finite() {
                kept.push(StdRow { coeffs: coeffs.clone(), kind: RowKind::Le, rhs: hi });
            }
            if lo.is_finite() {
                kept.push(StdRow { coeffs, kind: RowKind::Ge, rhs: lo });
            }
        }
        for row in &mut kept {
            // Prefer `<=` with a non-negative rhs: its slack starts basic and
            // no artificial column is needed.
            let flip = match row.kind {
                RowKind::Le | RowKind::Eq => row.rhs < 0.0,
                RowKind::Ge => row.rhs <= 0.0,
            };
            if flip {
                for (_, c) in &mut row.coeffs {
                    *c = -*c;
                }
                row.rhs = -row.rhs;
                row.kind = match row.kind {
                    RowKind::Le => RowKind::Ge,
                    RowKind::Ge => RowKind::Le,
                    RowKind::Eq => RowKind::Eq,
                };
            }
        }
        Some(Self { maps, n_cols, rows: kept })
    }

    /// Maximization costs on the structural columns for an original cost
    /// vector, with `sign = -1` turning a minimization into a maximization.
    fn column_costs(&self, c: &[f64], sign: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols];
        for (map, &cj) in self.maps.iter().zip(c) {
            match *map {
                ColMap::Fixed(_) => {}
                ColMap::Shifted { col, .. } => out[col] = sign * cj,
                ColMap::Mirrored { col, .. } => out[col] = -sign * cj,
                ColMap::Split { pos, neg } => {
                    out[pos] = sign * cj;
                    out[neg] = -sign * cj;
                }
            }
        }
        out
    }

    fn recover(&self, s: &[f64]) -> Vec<f64> {
        self.maps
            .iter()
            .map(|map| match *map {
                ColMap::Fixed(v) => v,
                ColMap::Shifted { col, lower } => lower + s[col],
                ColMap::Mirrored { col, upper } => upper - s[col],
                ColMap::Split { pos, neg } => s[pos] - s[neg],
            })
            .collect()
    }
}

/// Pivot magnitude below which reinversion treats the basis as singular
/// and keeps the tableau it has.
const REINVERT_SINGULAR_TOL: f64 = 1e-13;

/// A column counts as an unbounded ray only when no entry exceeds this;
/// entries between it and the pivot threshold are used as a last resort.
const UNBOUNDED_PIVOT_TOL: f64 = 1e-12;

struct PhaseResult {
    status: LpStatus,
    iterations: usize,
}

/// Row-major tableau `[A | b]` plus a reduced-cost row.
struct Tableau {
    opts: SimplexOptions,
    m: usize,
    /// Structural + slack + artificial columns (the rhs is column `width`).
    width: usize,
    n_structural: usize,
    first_artificial: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    allowed: Vec<bool>,
    reduced: Vec<f64>,
    /// Negated current objective value.
    reduced_rhs: f64,
    scratch: Vec<usize>,
}

enum Pricing {
    Dantzig,
    Bland,
}

impl Tableau {
    fn new(std: &StandardForm, opts: SimplexOptions) -> Self {
        let m = std.rows.len();
        let n_slack = std.rows.iter().filter(|r| r.kind != RowKind::Eq).count();
        let n_art = std.rows.iter().filter(|r| r.kind != RowKind::Le).count();
        let first_artificial = std.n_cols + n_slack;
        let width = first_artificial + n_art;
        let stride = width + 1;
        let mut data = vec![0.0; m * stride];
        let mut basis = vec![0; m];
        let mut slack = std.n_cols;
        let mut art = first_artificial;
        for (i, row) in std.rows.iter().enumerate() {
            let base = i * stride;
            for &(j, c) in &row.coeffs {
                data[base + j] += c;
            }
            data[base + width] = row.rhs;
            match row.kind {
                RowKind::Le => {
                    data[base + slack] = 1.0;
                    basis[i] = slack;
                    slack += 1;
                }
                RowKind::Ge => {
                    data[base + slack] = -1.0;
                    slack += 1;
                    data[base + art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
                RowKind::Eq => {
                    data[base + art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
            }
        }
        Self {
            opts,
            m,
            width,
            n_structural: std.n_cols,
            first_artificial,
            data,
            basis,
            allowed: vec![true; width],
            reduced: vec![0.0; width],
            reduced_rhs: 0.0,
            scratch: Vec::with_capacity(width),
        }
    }

    fn stride(&self) -> usize {
        self.width + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.stride() + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.stride() + self.width]
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.first_artificial
    }

    /// Reduced costs `r_j = c_j - c_B B^{-1} A_j` for a cost vector over all
    /// tableau columns, read off the current tableau.
    fn set_costs(&mut self, cost: &[f64]) {
        self.reduced.iter_mut().for_each(|r| *r = 0.0);
        self.reduced[..cost.len()].copy_from_slice(cost);
        self.reduced_rhs = 0.0;
        let stride = self.stride();
        for i in 0..self.m {
            let b = self.basis[i];
            let cb = if b < cost.len() { cost[b] } else { 0.0 };
            if cb != 0.0 {
                let row = &self.data[i * stride..(i + 1) * stride];
                for (r, &a) in self.reduced.iter_mut().zip(&row[..self.width]) {
                    *r -= cb * a;
                }
                self.reduced_rhs -= cb * row[self.width];
            }
        }
        for &b in &self.basis {
            self.reduced[b] = 0.0;
        }
    }

    /// Rebuilds the tableau for the current basis from the original rows by
    /// Gauss-Jordan elimination with partial pivoting, discarding the error
    /// accumulated over many pivots. Keeps the old tableau when the basis
    /// looks singular.
    fn reinvert(&mut self, std: &StandardForm) -> bool {
        let mut fresh = Tableau::new(std, self.opts);
        let mut in_target = vec![false; self.width];
        for &b in &self.basis {
            in_target[b] = true;
        }
        let mut locked: Vec<bool> = fresh.basis.iter().map(|&b| in_target[b]).collect();
        let mut is_basic = vec![false; self.width];
        for &b in &fresh.basis {
            is_basic[b] = true;
        }
        let stride = fresh.stride();
        for &q in &self.basis {
            if is_basic[q] {
                continue;
            }
            let mut best = None;
            let mut best_abs = REINVERT_SINGULAR_TOL;
            for i in 0..fresh.m {
                let a = fresh.data[i * stride + q].abs();
                if !locked[i] && a > best_abs {
                    best_abs = a;
                    best = Some(i);
                }
            }
            let Some(p) = best else {
                return false;
            };
            is_basic[fresh.basis[p]] = false;
            fresh.pivot(p, q);
            is_basic[q] = true;
            locked[p] = true;
        }
        fresh.allowed.clone_from(&self.allowed);
        *self = fresh;
        true
    }

    /// Pivots to optimality for `cost`, then re-derives the tableau and
    /// resumes while the clean tableau still shows an improving column.
    fn optimize(&mut self, std: &StandardForm, cost: &[f64]) -> PhaseResult {
        let mut total = 0;
        for round in 0..=self.opts.max_reinversions {
            self.set_costs(cost);
            if round > 0 && self.entering(&Pricing::Dantzig).is_none() {
                break;
            }
            let run = self.iterate();
            total += run.iterations;
            if run.status != LpStatus::Optimal {
                return PhaseResult { status: run.status, iterations: total };
            }
            if round == self.opts.max_reinversions || !self.reinvert(std) {
                break;
            }
        }
        self.set_costs(cost);
        PhaseResult { status: LpStatus::Optimal, iterations: total }
    }

    fn phase_one(&mut self, std: &StandardForm) -> PhaseResult {
        // Maximize -(sum of artificials).
        let cost: Vec<f64> = (0..self.width).map(|j| if self.is_artificial(j) { -1.0 } else { 0.0 }).collect();
        let run = self.optimize(std, &cost);
        if run.status != LpStatus::Optimal {
            return run;
        }
        let infeasibility: f64 = (0..self.m).filter(|&i| self.is_artificial(self.basis[i])).map(|i| self.rhs(i).max(0.0)).sum();
        if infeasibility > self.opts.feasibility_tol * (1.0 + self.m as f64).sqrt() {
            return PhaseResult { status: LpStatus::Infeasible, iterations: run.iterations };
        }
        for j in self.first_artificial..self.width {
            self.allowed[j] = false;
        }
        // Pivot remaining zero-level artificials out where possible; rows
        // where that fails are linearly dependent and stay inert.
        for i in 0..self.m {
            if !self.is_artificial(self.basis[i]) {
                continue;
            }
            let mut best = None;
            let mut best_abs = self.opts.pivot_tol;
            for j in 0..self.first_artificial {
                let a = self.at(i, j).abs();
                if a > best_abs {
                    best_abs = a;
                    best = Some(j);
                }
            }
            if let Some(j) = best {
                self.pivot(i, j);
            }
        }
        run
    }

    fn phase_two(&mut self, std: &StandardForm, cost: &[f64]) -> PhaseResult {
        self.optimize(std, cost)
    }

    fn iterate(&mut self) -> PhaseResult {
        let size = self.m + self.width;
        let bland_after = self.opts.bland_factor * size;
        let limit = self.opts.limit_factor * size + 1000;
        let mut iterations = 0;
        loop {
            let pricing = if iterations < bland_after { Pricing::Dantzig } else { Pricing::Bland };
            let Some(q) = self.entering(&pricing) else {
                return PhaseResult { status: LpStatus::Optimal, iterations };
            };
            let Some(p) = self.leaving(q, &pricing) else {
                return PhaseResult { status: LpStatus::Unbounded, iterations };
            };
            // A leaving value a hair below zero is snapped to zero so the
            // entering variable never starts negative.
            let at = p * self.stride() + self.width;
            if self.data[at] < 0.0 {
                self.data[at] = 0.0;
            }
            self.pivot(p, q);
            iterations += 1;
            if iterations >= limit {
                return PhaseResult { status: LpStatus::IterationLimit, iterations };
            }
            if !self.reduced_rhs.is_finite() {
                return PhaseResult { status: LpStatus::NumericFailure, iterations };
            }
        }
    }

    fn entering(&self, pricing: &Pricing) -> Option<usize> {
        let tol = self.opts.optimality_tol;
        match pricing {
            Pricing::Dantzig => {
                let mut best = None;
                let mut best_val = tol;
                for (j, &r) in self.reduced.iter().enumerate() {
                    if r > best_val && self.allowed[j] {
                        best_val = r;
                        best = Some(j);
                    }
                }
                best
            }
            Pricing::Bland => (0..self.width).find(|&j| self.allowed[j] && self.reduced[j] > tol),
        }
    }

    fn leaving(&self, q: usize, pricing: &Pricing) -> Option<usize> {
        match pricing {
            Pricing::Dantzig => self.leaving_harris(q, self.opts.pivot_tol).or_else(|| self.leaving_harris(q, UNBOUNDED_PIVOT_TOL)),
            Pricing::Bland => {
                let stable = self.opts.stable_pivot_tol.max(self.opts.pivot_tol);
                self.leaving_bland(q, stable).or_else(|| self.leaving_bland(q, self.opts.pivot_tol))
            }
        }
    }

    /// Two-pass ratio test: the largest step allowed when every basic value
    /// may dip to `-feasibility_tol`, then the largest pivot among rows whose
    /// exact ratio fits within that step.
    fn leaving_harris(&self, q: usize, tol: f64) -> Option<usize> {
        let stride = self.stride();
        let delta = self.opts.feasibility_tol;
        let mut step = f64::INFINITY;
        for i in 0..self.m {
            let a = self.data[i * stride + q];
            if a > tol {
                step = step.min((self.data[i * stride + self.width] + delta) / a);
            }
        }
        if !step.is_finite() {
            return None;
        }
        let step = step.max(0.0);
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let a = self.data[i * stride + q];
            if a > tol && self.data[i * stride + self.width].max(0.0) / a <= step && best.map_or(true, |(_, ba)| a > ba) {
                best = Some((i, a));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Minimum-ratio rule with ties broken by the smallest basic index.
    fn leaving_bland(&self, q: usize, tol: f64) -> Option<usize> {
        let stride = self.stride();
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let a = self.data[i * stride + q];
            if a <= tol {
                continue;
            }
            let ratio = self.data[i * stride + self.width].max(0.0) / a;
            let better = match best {
                None => true,
                Some((bi, br)) => {
                    if (ratio - br).abs() <= 1e-12 * (1.0 + br.abs()) {
                        self.basis[i] < self.basis[bi]
                    } else {
                        ratio < br
                    }
                }
            };
            if better {
                best = Some((i, ratio));
            }
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let stride = self.stride();
        let width = self.width;
        let inv = 1.0 / self.data[p * stride + q];
        {
            let row = &mut self.data[p * stride..(p + 1) * stride];
            for v in row.iter_mut() {
                *v *= inv;
                if v.abs() < 1e-14 {
                    *v = 0.0;
                }
            }
            row[q] = 1.0;
        }
        self.scratch.clear();
        for k in 0..=width {
            if self.data[p * stride + k] != 0.0 {
                self.scratch.push(k);
            }
        }
        let (before, rest) = self.data.split_at_mut(p * stride);
        let (pivot_row, after) = rest.split_at_mut(stride);
        let sparse = self.scratch.len() * 3 < stride;
        let update = |row: &mut [f64], nz: &[usize]| {
            let f = row[q];
            if f == 0.0 {
                return;
            }
            if sparse {
                for &k in nz {
                    row[k] -= f * pivot_row[k];
                }
            } else {
                for (v, &pv) in row.iter_mut().zip(pivot_row.iter()) {
                    *v -= f * pv;
                }
            }
            row[q] = 0.0;
        };
        for row in before.chunks_exact_mut(stride) {
            update(row, &self.scratch);
        }
        for row in after.chunks_exact_mut(stride) {
            update(row, &self.scratch);
        }
        let f = self.reduced[q];
        if f != 0.0 {
            for &k in &self.scratch {
                if k < width {
                    self.reduced[k] -= f * pivot_row[k];
                }
            }
            self.reduced_rhs -= f * pivot_row[width];
            self.reduced[q] = 0.0;
        }
        self.basis[p] = q;
    }

    /// Values of the structural columns at the current basis.
    fn column_values(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.n_structural];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_structural {
                s[b] = self.rhs(i).max(0.0);
            }
        }
        s
    }
}
