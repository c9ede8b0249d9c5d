//! The oracle suite as one seeded run with a pass/fail line per check.

use std::fmt;

use prgsr_lp::DenseSimplex;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::ambiguity::AmbiguityModel;
use crate::benchmark::{benchmark_prospect, discretized_truth, nominal_weighting, pinned_model};
use crate::elicitation::value_polytope_nonempty;
use crate::functions::distorted_expectation;
use crate::gsr::{gsr_cpt, BisectionConfig};
use crate::oracle::{oracle_gsr_grid, oracle_h, oracle_robust_equivalence, random_prospect, random_tuple, seeded_tiny_instance};
use crate::prospect::Prospect;
use crate::reformulation::{evaluate, Method};
use crate::robust::{prgsr, RobustConfig};
use crate::Result;

/// Value of the reference problem, to four decimals.
pub const TRUE_PROBLEM_VALUE: f64 = 0.2044;
pub const TRUE_PROBLEM_TOL: f64 = 5e-3;

/// Floating-point slack on the oracle sandwich, beyond the resolution bound.
pub const SANDWICH_SLACK: f64 = 1e-9;

/// Largest disagreement between the two evaluation paths on a supplied model.
pub const MODEL_PATH_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    pub seed: u64,
    pub tiny_instances: usize,
    pub value_resolution: usize,
    pub weighting_resolution: usize,
    pub equivalence_sets: usize,
    pub gsr_grid_instances: usize,
    pub gsr_grid_resolution: f64,
    pub bisection: BisectionConfig,
    /// A model to check on top of the oracle suite: its value set must be
    /// non-empty and both evaluation paths must agree on `prospect`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<AmbiguityModel>,
    pub prospect: Prospect,
    /// Levels, evenly spaced over the prospect's support, at which the
    /// model check compares the paths.
    pub model_levels: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tiny_instances: 50,
            value_resolution: 48,
            weighting_resolution: 24,
            equivalence_sets: 100,
            gsr_grid_instances: 50,
            gsr_grid_resolution: 1e-3,
            bisection: BisectionConfig::default(),
            model: None,
            prospect: benchmark_prospect(),
            model_levels: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub instances: usize,
    /// The worst observed quantity that the tolerance bounds.
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {:<22} n={:<4} worst={:.3e} tol={:.3e}  {}", c.name, c.instances, c.worst, c.tolerance, c.detail)?;
        }
        Ok(())
    }
}

pub fn run_verification(cfg: &VerifyConfig) -> Result<VerificationReport> {
    cfg.bisection.validate()?;
    let mut checks = vec![true_problem(cfg)?, singleton_collapse(cfg)?, oracle_sandwich(cfg)?, robust_equivalence(cfg)?, gsr_grid(cfg)?];
    if let Some(model) = &cfg.model {
        checks.push(model_paths(cfg, model)?);
    }
    Ok(VerificationReport { seed: cfg.seed, checks })
}

pub fn true_problem(cfg: &VerifyConfig) -> Result<Check> {
    let v = discretized_truth(&truth_breakpoints())?;
    let w = nominal_weighting();
    let rho = gsr_cpt(&v, &w, &w, &benchmark_prospect(), &cfg.bisection)?.rho;
    let err = (rho - TRUE_PROBLEM_VALUE).abs();
    Ok(Check {
        name: "true_problem".into(),
        passed: err <= TRUE_PROBLEM_TOL,
        instances: 1,
        worst: err,
        tolerance: TRUE_PROBLEM_TOL,
        detail: format!("rho = {rho:.6}"),
    })
}

/// 1001 evenly spaced points on the reference domain.
pub fn truth_breakpoints() -> Vec<f64> {
    (0..=1000).map(|k| -0.5 + k as f64 / 1000.0).collect()
}

pub fn singleton_collapse(cfg: &VerifyConfig) -> Result<Check> {
    let xi = benchmark_prospect();
    let grid: Vec<f64> = (0..=20).map(|k| -0.5 + k as f64 / 20.0).collect();
    let v = discretized_truth(&grid)?;
    let w = nominal_weighting();
    let model = pinned_model(&v, &w, 0.0)?;
    let solver = DenseSimplex::default();
    let mut worst = 0.0f64;
    for x in [0.1, 0.2, 0.3] {
        let h = evaluate(&model, &xi, x, Method::FullLp, &solver)?.h;
        worst = worst.max((h - distorted_expectation(&v, &w, &w, &xi, x)?).abs());
    }
    let robust = prgsr(&model, &xi, &RobustConfig { bisection: cfg.bisection, ..RobustConfig::default() })?.rho;
    let single = gsr_cpt(&v, &w, &w, &xi, &cfg.bisection)?.rho;
    let rho_err = (robust - single).abs();
    let passed = worst <= 1e-8 && rho_err <= 2.0 * cfg.bisection.abs_tol;
    Ok(Check { name: "singleton_collapse".into(), passed, instances: 3, worst, tolerance: 1e-8, detail: format!("|prgsr - gsr| = {rho_err:.2e}") })
}

pub fn oracle_sandwich(cfg: &VerifyConfig) -> Result<Check> {
    let solver = DenseSimplex::default();
    let (mut below, mut above, mut gap_max, mut bound_max, mut excess) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0f64, 0.0f64, f64::NEG_INFINITY);
    for i in 0..cfg.tiny_instances {
        let inst = seeded_tiny_instance(cfg.seed.wrapping_add(i as u64))?;
        let oracle = oracle_h(&inst.model, &inst.prospect, inst.x, cfg.value_resolution, cfg.weighting_resolution)?;
        let ev = evaluate(&inst.model, &inst.prospect, inst.x, Method::FullLp, &solver)?;
        let gap = ev.consistent_gap(&inst.model, &inst.prospect, &solver)?;
        below = below.max(oracle.value - oracle.bound - ev.h);
        above = above.max(ev.h - oracle.value - gap - oracle.bound);
        gap_max = gap_max.max(gap);
        excess = excess.max(ev.h - oracle.value);
        bound_max = bound_max.max(oracle.bound);
    }
    let worst = below.max(above);
    Ok(Check {
        name: "oracle_sandwich".into(),
        passed: worst <= SANDWICH_SLACK,
        instances: cfg.tiny_instances,
        worst,
        tolerance: SANDWICH_SLACK,
        detail: format!("max h - oracle {excess:.2e}, max slice gap {gap_max:.2e}, max bound {bound_max:.2e}"),
    })
}

pub fn robust_equivalence(cfg: &VerifyConfig) -> Result<Check> {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut worst = 0.0f64;
    for _ in 0..cfg.equivalence_sets {
        let n = rand::Rng::gen_range(&mut rng, 1..=5);
        let tuples = (0..n).map(|_| random_tuple(&mut rng)).collect::<Result<Vec<_>>>()?;
        let prospect = random_prospect(&mut rng, 10, 0.5)?;
        let (a, b) = oracle_robust_equivalence(&tuples, &prospect, &cfg.bisection)?;
        worst = worst.max((a - b).abs());
    }
    let tol = 2.0 * cfg.bisection.abs_tol;
    Ok(Check { name: "robust_equivalence".into(), passed: worst <= tol, instances: cfg.equivalence_sets, worst, tolerance: tol, detail: String::new() })
}

/// The supplied model's value set is non-empty, and the full program and
/// the decomposed path give the same worst-case value at each level.
pub fn model_paths(cfg: &VerifyConfig, model: &AmbiguityModel) -> Result<Check> {
    let name = "model_paths".to_string();
    if !value_polytope_nonempty(model)? {
        return Ok(Check { name, passed: false, instances: 0, worst: f64::INFINITY, tolerance: MODEL_PATH_TOL, detail: "no admissible value function".into() });
    }
    let solver = DenseSimplex::default();
    let (lo, hi) = (cfg.prospect.min(), cfg.prospect.max());
    let n = cfg.model_levels.max(1);
    let mut worst = 0.0f64;
    for k in 0..n {
        let x = if n == 1 { lo } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 };
        let full = evaluate(model, &cfg.prospect, x, Method::FullLp, &solver)?.h;
        let split = evaluate(model, &cfg.prospect, x, Method::Decomposed, &solver)?.h;
        worst = worst.max((full - split).abs());
    }
    Ok(Check { name, passed: worst <= MODEL_PATH_TOL, instances: n, worst, tolerance: MODEL_PATH_TOL, detail: String::new() })
}

pub fn gsr_grid(cfg: &VerifyConfig) -> Result<Check> {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    rng.set_stream(2);
    let mut worst = 0.0f64;
    for _ in 0..cfg.gsr_grid_instances {
        let t = random_tuple(&mut rng)?;
        let prospect = random_prospect(&mut rng, 10, 0.5)?;
        let grid = oracle_gsr_grid(&t.value, &t.w_minus, &t.w_plus, &prospect, cfg.gsr_grid_resolution)?;
        let rho = gsr_cpt(&t.value, &t.w_minus, &t.w_plus, &prospect, &cfg.bisection)?.rho;
        worst = worst.max((grid - rho).abs());
    }
    let tol = cfg.gsr_grid_resolution + cfg.bisection.abs_tol;
    Ok(Check { name: "gsr_grid".into(), passed: worst <= tol, instances: cfg.gsr_grid_instances, worst, tolerance: tol, detail: String::new() })
}
