use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Lower bound on slopes of value and weighting functions inside linear
/// programs, standing in for strict positivity.
pub const EPS_POS: f64 = 1e-7;

/// Default relative tolerance for continuity, `v(0) = 0` and shape checks.
pub const SHAPE_TOL: f64 = 1e-9;

/// Continuous, strictly increasing, piecewise-linear value function on
/// `[breakpoints[0], breakpoints[J-1]]`.
///
/// Piece `j` is `a_j y + b_j` on `(y_j, y_{j+1}]`, except that the first
/// piece also owns its left endpoint. One breakpoint is exactly zero and the
/// function vanishes there; slopes do not decrease left of zero and do not
/// increase right of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawValue")]
pub struct PLValueFunction {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    intercepts: Vec<f64>,
}

#[derive(Deserialize)]
struct RawValue {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    intercepts: Vec<f64>,
}

impl TryFrom<RawValue> for PLValueFunction {
    type Error = Error;
    fn try_from(raw: RawValue) -> Result<Self> {
        Self::new(raw.breakpoints, raw.slopes, raw.intercepts)
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidFunction(msg.into())
}

impl PLValueFunction {
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, intercepts: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(breakpoints, slopes, intercepts, SHAPE_TOL)
    }

    /// Like [`PLValueFunction::new`] with a caller-chosen relative tolerance
    /// for continuity, `v(0) = 0` and slope ordering.
    pub fn with_tolerance(breakpoints: Vec<f64>, slopes: Vec<f64>, intercepts: Vec<f64>, tol: f64) -> Result<Self> {
        let v = Self { breakpoints, slopes, intercepts };
        v.validate(tol)?;
        Ok(v)
    }

    /// Builds the interpolant through `(breakpoints[k], values[k])`.
    pub fn from_values(breakpoints: &[f64], values: &[f64]) -> Result<Self> {
        if breakpoints.len() != values.len() || breakpoints.len() < 2 {
            return Err(invalid("need at least two breakpoints and one value per breakpoint"));
        }
        let mut slopes = Vec::with_capacity(breakpoints.len() - 1);
        let mut intercepts = Vec::with_capacity(breakpoints.len() - 1);
        for k in 0..breakpoints.len() - 1 {
            let a = (values[k + 1] - values[k]) / (breakpoints[k + 1] - breakpoints[k]);
            slopes.push(a);
            intercepts.push(values[k] - a * breakpoints[k]);
        }
        Self::new(breakpoints.to_vec(), slopes, intercepts)
    }

    /// Piecewise-linear interpolation of `f` at `breakpoints`.
    pub fn interpolate(f: impl Fn(f64) -> f64, breakpoints: &[f64]) -> Result<Self> {
        let values: Vec<f64> = breakpoints.iter().map(|&y| if y == 0.0 { 0.0 } else { f(y) }).collect();
        Self::from_values(breakpoints, &values)
    }

    /// `v(t) = t` on `[lower, upper]` with breakpoints `{lower, 0, upper}`.
    pub fn linear(lower: f64, upper: f64) -> Result<Self> {
        Self::from_values(&[lower, 0.0, upper], &[lower, 0.0, upper])
    }

    fn validate(&self, tol: f64) -> Result<()> {
        let y = &self.breakpoints;
        let j = y.len();
        if j < 2 || self.slopes.len() != j - 1 || self.intercepts.len() != j - 1 {
            return Err(invalid(format!(
                "{} breakpoints need {} slopes and intercepts, got {} and {}",
                j,
                j.saturating_sub(1),
                self.slopes.len(),
                self.intercepts.len()
            )));
        }
        if y.iter().chain(&self.slopes).chain(&self.intercepts).any(|v| !v.is_finite()) {
            return Err(invalid("non-finite entry"));
        }
        if y.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("breakpoints must be strictly increasing"));
        }
        if self.slopes.iter().any(|&a| a <= 0.0) {
            return Err(invalid("slopes must be positive"));
        }
        let scale = 1.0 + self.breakpoints.iter().zip(&self.slopes).map(|(y, a)| (a * y).abs()).fold(0.0, f64::max);
        for k in 1..j - 1 {
            let left = self.slopes[k - 1] * y[k] + self.intercepts[k - 1];
            let right = self.slopes[k] * y[k] + self.intercepts[k];
            if (left - right).abs() > tol * scale {
                return Err(invalid(format!("discontinuity of {} at {}", left - right, y[k])));
            }
        }
        let j0 = y.iter().position(|&t| t == 0.0).ok_or_else(|| invalid("zero must be a breakpoint"))?;
        if self.node_value(j0).abs() > tol * scale {
            return Err(invalid(format!("v(0) = {} instead of 0", self.node_value(j0))));
        }
        let slope_tol = tol * self.slopes.iter().fold(0.0, |m: f64, &a| m.max(a));
        for k in 0..j - 2 {
            let (a, b) = (self.slopes[k], self.slopes[k + 1]);
            let ok = if k + 1 < j0 {
                a <= b + slope_tol
            } else if k >= j0 {
                b <= a + slope_tol
            } else {
                true
            };
            if !ok {
                return Err(invalid(format!("slopes {a} and {b} around {} break the S-shape", y[k + 1])));
            }
        }
        Ok(())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn intercepts(&self) -> &[f64] {
        &self.intercepts
    }

    pub fn lower(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn upper(&self) -> f64 {
        *self.breakpoints.last().expect("at least two breakpoints")
    }

    pub fn zero_index(&self) -> usize {
        self.breakpoints.iter().position(|&t| t == 0.0).expect("validated")
    }

    /// The piece owning `y`, clamped to the first or last piece outside the
    /// domain.
    pub fn piece_of(&self, y: f64) -> usize {
        piece_index(&self.breakpoints, y)
    }

    /// `v(y_k)` evaluated on the piece that owns `y_k`.
    pub fn node_value(&self, k: usize) -> f64 {
        let p = if k == 0 { 0 } else { k - 1 };
        self.slopes[p] * self.breakpoints[k] + self.intercepts[p]
    }

    pub fn node_values(&self) -> Vec<f64> {
        (0..self.breakpoints.len()).map(|k| self.node_value(k)).collect()
    }

    /// `v(lower)`.
    pub fn left_value(&self) -> f64 {
        self.node_value(0)
    }

    /// `v(upper)`.
    pub fn right_value(&self) -> f64 {
        self.node_value(self.breakpoints.len() - 1)
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        let (lo, hi) = (self.lower(), self.upper());
        let slack = DOMAIN_TOL * (1.0 + lo.abs().max(hi.abs()));
        if !(y >= lo - slack && y <= hi + slack) {
            return Err(Error::OutOfDomain { value: y, lower: lo, upper: hi });
        }
        Ok(self.eval_unchecked(y))
    }

    /// Evaluates the owning piece without a domain check; outside the domain
    /// the first or last piece is extended linearly.
    pub fn eval_unchecked(&self, y: f64) -> f64 {
        let j = self.piece_of(y);
        self.slopes[j] * y + self.intercepts[j]
    }
}

/// Slack allowed when a shifted outcome lands a rounding error outside the
/// value-function domain (relative to the domain's magnitude).
pub const DOMAIN_TOL: f64 = 1e-12;

/// Index of the piece owning `y` for sorted `breakpoints`: the first piece is
/// `[y_0, y_1]`, later pieces are `(y_j, y_{j+1}]`.
pub fn piece_index(breakpoints: &[f64], y: f64) -> usize {
    let k = breakpoints.partition_point(|&b| b < y);
    k.clamp(1, breakpoints.len() - 1) - 1
}
