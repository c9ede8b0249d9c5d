//! Closed-form value and weighting functions used to simulate the decision
//! maker and to build nominal weightings.

use serde::{Deserialize, Serialize};

/// Power value function `x^g` on gains and `-λ(-x)^l` on losses, together
/// with the one-parameter weighting `p^γ / (p^γ + (1-p)^γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFunctions {
    pub gain_exponent: f64,
    pub loss_exponent: f64,
    pub loss_aversion: f64,
    pub gamma: f64,
}

impl Default for ReferenceFunctions {
    fn default() -> Self {
        Self { gain_exponent: 1.0 / 3.0, loss_exponent: 0.2, loss_aversion: 1.5, gamma: 0.6 }
    }
}

impl ReferenceFunctions {
    pub fn value(&self, x: f64) -> f64 {
        if x >= 0.0 {
            x.powf(self.gain_exponent)
        } else {
            -self.loss_aversion * (-x).powf(self.loss_exponent)
        }
    }

    pub fn weighting(&self, p: f64) -> f64 {
        cpt_weighting(p, self.gamma)
    }

    pub fn weighting_inverse(&self, y: f64) -> f64 {
        cpt_weighting_inverse(y, self.gamma)
    }
}

/// The default reference value function.
pub fn true_value(x: f64) -> f64 {
    ReferenceFunctions::default().value(x)
}

/// `p^γ / (p^γ + (1-p)^γ)` with exact endpoints.
pub fn cpt_weighting(p: f64, gamma: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let a = p.powf(gamma);
    let b = (1.0 - p).powf(gamma);
    a / (a + b)
}

/// Inverse of [`cpt_weighting`]: from `y = 1 / (1 + ((1-p)/p)^γ)` one gets
/// `p = 1 / (1 + ((1-y)/y)^{1/γ})`.
pub fn cpt_weighting_inverse(y: f64, gamma: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    1.0 / (1.0 + ((1.0 - y) / y).powf(1.0 / gamma))
}
