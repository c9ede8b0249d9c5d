//! Preference-robust generalized shortfall risk with rank-dependent
//! (cumulative prospect theory) preferences.
//!
//! The pieces, bottom-up:
//!
//! * [`prospect`]: finitely supported prospects and decision weights.
//! * [`functions`]: piecewise-linear value and weighting functions.
//! * [`gsr`]: shortfall risk of a single preference tuple.
//! * [`ambiguity`]: elicited constraints, weighting balls, breakpoint grids.
//! * [`reformulation`]: the worst-case expected value `h(x)` as a linear
//!   program, and recovery of the worst-case tuple.
//! * [`robust`]: bisection on `h` and the finite-set robust evaluator.
//! * [`elicitation`]: a simulated decision maker and question generators.
//! * [`oracle`]: brute-force cross-checks for small instances.
//! * [`experiment`]: parameter sweeps and their CSV/JSON output.

pub mod ambiguity;
pub mod benchmark;
pub mod elicitation;
mod error;
pub mod experiment;
pub mod functions;
pub mod gsr;
pub mod numeric;
pub mod oracle;
pub mod prospect;
pub mod reformulation;
pub mod robust;
pub mod verify;

pub use error::{Error, Result};
