use thiserror::Error;

/// Direction of optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Relation between a row's left-hand side and its right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Eq,
    Ge,
}

impl RowKind {
    pub fn symbol(self) -> &'static str {
        match self {
            RowKind::Le => "<=",
            RowKind::Eq => "=",
            RowKind::Ge => ">=",
        }
    }
}

/// One constraint row with sparse coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// Free-form label; callers use it to group rows into families.
    pub label: String,
    pub coeffs: Vec<(usize, f64)>,
    pub kind: RowKind,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, c)| c * x[j]).sum()
    }

    /// Amount by which `x` violates this row (zero when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.kind {
            RowKind::Le => (lhs - self.rhs).max(0.0),
            RowKind::Ge => (self.rhs - lhs).max(0.0),
            RowKind::Eq => (lhs - self.rhs).abs(),
        }
    }

    /// Violation divided by the row's natural scale `1 + |rhs| + Σ|c_j x_j|`.
    pub fn relative_violation(&self, x: &[f64]) -> f64 {
        let scale: f64 = 1.0 + self.rhs.abs() + self.coeffs.iter().map(|&(j, c)| (c * x[j]).abs()).sum::<f64>();
        self.violation(x) / scale
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("row {row} references variable {var} but the problem has {n} variables")]
    VariableOutOfRange { row: usize, var: usize, n: usize },
    #[error("variable {var} has lower bound {lower} above upper bound {upper}")]
    InconsistentBounds { var: usize, lower: f64, upper: f64 },
    #[error("non-finite coefficient in {0}")]
    NonFinite(String),
}

/// A linear program `opt c·x` subject to rows and bounds `lower <= x <= upper`.
///
/// Variables default to `0 <= x < +inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Row>,
}

impl LpProblem {
    pub fn new(sense: Sense, n_vars: usize) -> Self {
        Self { sense, objective: vec![0.0; n_vars], lower: vec![0.0; n_vars], upper: vec![f64::INFINITY; n_vars], rows: Vec::new() }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Appends a variable with the given bounds and objective coefficient,
    /// returning its index.
    pub fn add_var(&mut self, lower: f64, upper: f64, cost: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn set_free(&mut self, var: usize) {
        self.set_bounds(var, f64::NEG_INFINITY, f64::INFINITY);
    }

    /// Appends a row. Zero coefficients are dropped and repeated indices are
    /// summed. Returns the row index.
    pub fn add_row<I>(&mut self, label: impl Into<String>, coeffs: I, kind: RowKind, rhs: f64) -> usize
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let mut merged: Vec<(usize, f64)> = coeffs.into_iter().filter(|&(_, c)| c != 0.0).collect();
        merged.sort_by_key(|&(j, _)| j);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(merged.len());
        for (j, c) in merged {
            match out.last_mut() {
                Some((k, acc)) if *k == j => *acc += c,
                _ => out.push((j, c)),
            }
        }
        out.retain(|&(_, c)| c != 0.0);
        self.rows.push(Row { label: label.into(), coeffs: out, kind, rhs });
        self.rows.len() - 1
    }

    /// Checks index ranges, bound consistency and finiteness.
    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.n_vars();
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite("objective".into()));
        }
        for (var, (&lo, &hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if lo > hi || lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(LpError::InconsistentBounds { var, lower: lo, upper: hi });
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(LpError::NonFinite(format!("rhs of row {r} ({})", row.label)));
            }
            for &(j, c) in &row.coeffs {
                if j >= n {
                    return Err(LpError::VariableOutOfRange { row: r, var: j, n });
                }
                if !c.is_finite() {
                    return Err(LpError::NonFinite(format!("row {r} ({})", row.label)));
                }
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest relative row violation of `x` (see [`Row::relative_violation`]).
    pub fn max_row_violation(&self, x: &[f64]) -> f64 {
        self.rows.iter().map(|r| r.relative_violation(x)).fold(0.0, f64::max)
    }

    /// Largest absolute bound violation of `x`.
    pub fn max_bound_violation(&self, x: &[f64]) -> f64 {
        x.iter().zip(self.lower.iter().zip(&self.upper)).map(|(&v, (&lo, &hi))| (lo - v).max(v - hi).max(0.0)).fold(0.0, f64::max)
    }
}
