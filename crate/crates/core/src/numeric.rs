//! Small numerical helpers shared across modules.

use std::sync::OnceLock;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Gauss–Legendre nodes and weights on [-1, 1].
fn gauss_legendre_16() -> &'static [(f64, f64); 16] {
    static RULE: OnceLock<[(f64, f64); 16]> = OnceLock::new();
    RULE.get_or_init(|| {
        const N: usize = 16;
        let mut rule = [(0.0, 0.0); N];
        for (i, slot) in rule.iter_mut().enumerate() {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
            let mut deriv = 0.0;
            for _ in 0..100 {
                // Legendre recurrence for P_N(x) and P_{N-1}(x).
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=N {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                deriv = N as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / deriv;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * deriv * deriv));
        }
        rule
    })
}

/// Integral of `f` over `[a, b]` by 16-point Gauss–Legendre quadrature.
pub fn gauss_legendre(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    compensated_sum(gauss_legendre_16().iter().map(|&(x, w)| w * f(mid + half * x))) * half
}

/// Bisection for the root of a non-increasing function on `[lower, upper]`.
///
/// Keeps `f(lo) > 0 >= f(hi)` and stops once `hi - lo <= abs_tol`.
/// Returns `(lo, hi, iterations)`.
pub fn bisect_decreasing<F, E>(mut f: F, lower: f64, upper: f64, abs_tol: f64, max_iter: usize) -> Result<(f64, f64, usize), BisectError<E>>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let (mut lo, mut hi) = (lower, upper);
    let mut iterations = 0;
    while hi - lo > abs_tol {
        if iterations >= max_iter {
            return Err(BisectError::NotConverged(iterations));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid).map_err(BisectError::Inner)? <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok((lo, hi, iterations))
}

#[derive(Debug)]
pub enum BisectError<E> {
    NotConverged(usize),
    Inner(E),
}

impl From<BisectError<crate::Error>> for crate::Error {
    fn from(e: BisectError<crate::Error>) -> Self {
        match e {
            BisectError::NotConverged(iterations) => crate::Error::BisectionNotConverged { iterations },
            BisectError::Inner(e) => e,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_is_exact_for_polynomials() {
        let rule = gauss_legendre_16();
        let total: f64 = rule.iter().map(|r| r.1).sum();
        assert!((total - 2.0).abs() < 1e-14);
        let val = gauss_legendre(&|t| t.powi(31) + 3.0 * t * t, 0.0, 1.0);
        assert!((val - (1.0 / 32.0 + 1.0)).abs() < 1e-13);
    }

    #[test]
    fn compensation_recovers_small_terms() {
        let vals = [1.0, 1e-16, 1e-16, 1e-16, 1e-16, -1.0];
        assert!((compensated_sum(vals) - 4e-16).abs() < 1e-30);
    }

    #[test]
    fn bisection_brackets_root() {
        let (lo, hi, it) = bisect_decreasing::<_, ()>(|x| Ok(0.3 - x), 0.0, 1.0, 1e-10, 200).unwrap();
        assert!(lo < 0.3 && 0.3 <= hi && hi - lo <= 1e-10);
        assert!(it <= 40);
    }

    #[test]
    fn bisection_reports_iteration_cap() {
        let r = bisect_decreasing::<_, ()>(|x| Ok(0.3 - x), 0.0, 1.0, 1e-12, 5);
        assert!(matches!(r, Err(BisectError::NotConverged(5))));
    }
}
