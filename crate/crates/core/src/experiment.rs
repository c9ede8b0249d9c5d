//! Convergence sweeps on the reference instance: how the robust shortfall
//! risk and the worst-case value function move as pairwise questions,
//! certainty-equivalent questions, or the weighting radius change.
//!
//! Within one replication the questionnaires are nested: each M-sweep point
//! extends the session of the previous point, and likewise for K. The
//! ambiguity sets therefore shrink along a sweep, and the robust value can
//! only move one way.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ambiguity::{AmbiguityModel, WeightingBall};
use crate::benchmark::{benchmark_domain, benchmark_prospect, discretized_truth, tenth_grid, GAMMA};
use crate::elicitation::{ElicitationSession, SimulatedDM};
use crate::functions::reference::cpt_weighting;
use crate::functions::{Envelope, PLWeighting, ShapeCheck};
use crate::prospect::Prospect;
use crate::reformulation::WorstCaseTuple;
use crate::robust::{prgsr, RobustConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// Seed of the first replication; replication `i` uses `seed + i`.
    pub seed: u64,
    pub replications: usize,
    pub prospect: Prospect,
    /// Breakpoints of the nominal weighting, which centers both balls and
    /// weights the certainty-equivalent records.
    pub weighting_grid: Vec<f64>,
    pub tau_max: f64,
    /// Ball radius used by the M and K sweeps.
    pub radius: f64,
    /// Number of CE questions held fixed during the M sweep.
    pub fixed_k: usize,
    /// Number of pairwise questions held fixed during the K and r sweeps.
    pub fixed_m: usize,
    pub m_sweep: Vec<usize>,
    pub k_sweep: Vec<usize>,
    pub r_sweep: Vec<f64>,
    /// Evenly spaced points on the value domain at which the worst-case
    /// value function is sampled.
    pub sample_points: usize,
    pub robust: RobustConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let counts = vec![5, 20, 40, 60, 80, 100];
        Self {
            seed: 1,
            replications: 1,
            prospect: benchmark_prospect(),
            weighting_grid: tenth_grid(),
            tau_max: 0.05,
            radius: 0.01,
            fixed_k: 5,
            fixed_m: 5,
            m_sweep: counts.clone(),
            k_sweep: counts,
            r_sweep: vec![0.16, 0.08, 0.04, 0.02, 0.01, 0.0],
            sample_points: 101,
            robust: RobustConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.m_sweep.is_empty() && self.k_sweep.is_empty() && self.r_sweep.is_empty() {
            return bad("all sweeps are empty".into());
        }
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if !self.m_sweep.windows(2).all(|w| w[0] < w[1]) || !self.k_sweep.windows(2).all(|w| w[0] < w[1]) {
            return bad("question counts in a sweep must be strictly increasing".into());
        }
        if let Some(r) = self.r_sweep.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return bad(format!("radius {r} is not a non-negative number"));
        }
        if self.sample_points < 2 {
            return bad("need at least two sample points".into());
        }
        self.robust.bisection.validate()
    }

    fn nominal_weighting(&self) -> Result<PLWeighting> {
        PLWeighting::interpolate(|p| cpt_weighting(p, GAMMA), &self.weighting_grid, ShapeCheck::Enforce)
    }

    /// The model with no records yet.
    pub fn base_model(&self, radius: f64) -> Result<AmbiguityModel> {
        let w = self.nominal_weighting()?;
        let ball = WeightingBall::new(w.clone(), radius, Envelope::default())?;
        AmbiguityModel::new(Vec::new(), Vec::new(), (w.clone(), w), benchmark_domain(), ball.clone(), ball)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Pairwise,
    CertaintyEquivalent,
    Radius,
}

impl SweepKind {
    pub const ALL: [SweepKind; 3] = [SweepKind::Pairwise, SweepKind::CertaintyEquivalent, SweepKind::Radius];

    pub fn as_str(self) -> &'static str {
        match self {
            SweepKind::Pairwise => "m_sweep",
            SweepKind::CertaintyEquivalent => "k_sweep",
            SweepKind::Radius => "r_sweep",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub sweep: SweepKind,
    pub replication: usize,
    pub seed: u64,
    /// M, K, or r, depending on the sweep.
    pub parameter: f64,
    pub n_pairwise: usize,
    pub n_ce: usize,
    pub rho: f64,
    pub h_at_rho: f64,
    pub iterations: usize,
    /// Largest deviation of the worst-case value function from the truth
    /// at the shifted outcomes `ξ_i - rho`.
    pub sup_distance: f64,
    pub slice_gap: f64,
    pub consistent_gap: f64,
    pub value_samples: Vec<(f64, f64)>,
    pub w_minus_slopes: Vec<f64>,
    pub w_plus_slopes: Vec<f64>,
    /// The admissible tuple with re-optimized value function.
    pub worst_case: WorstCaseTuple,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub m_sweep: Vec<SweepPoint>,
    pub k_sweep: Vec<SweepPoint>,
    pub r_sweep: Vec<SweepPoint>,
}

impl ExperimentReport {
    pub fn sweep(&self, kind: SweepKind) -> &[SweepPoint] {
        match kind {
            SweepKind::Pairwise => &self.m_sweep,
            SweepKind::CertaintyEquivalent => &self.k_sweep,
            SweepKind::Radius => &self.r_sweep,
        }
    }

    /// Points of one replication in sweep order.
    pub fn replication(&self, kind: SweepKind, replication: usize) -> Vec<&SweepPoint> {
        self.sweep(kind).iter().filter(|p| p.replication == replication).collect()
    }

    /// Median sup-distance over replications at one parameter value.
    pub fn median_distance(&self, kind: SweepKind, parameter: f64) -> Option<f64> {
        let mut d: Vec<f64> = self.sweep(kind).iter().filter(|p| p.parameter == parameter).map(|p| p.sup_distance).collect();
        if d.is_empty() {
            return None;
        }
        d.sort_by(f64::total_cmp);
        let n = d.len();
        Some(if n % 2 == 1 { d[n / 2] } else { 0.5 * (d[n / 2 - 1] + d[n / 2]) })
    }
}

/// Runs every sweep for every replication. Replications and sweeps run on
/// separate threads; the result does not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let jobs: Vec<(usize, SweepKind)> = (0..cfg.replications)
        .flat_map(|rep| SweepKind::ALL.into_iter().map(move |k| (rep, k)))
        .filter(|&(_, k)| match k {
            SweepKind::Pairwise => !cfg.m_sweep.is_empty(),
            SweepKind::CertaintyEquivalent => !cfg.k_sweep.is_empty(),
            SweepKind::Radius => !cfg.r_sweep.is_empty(),
        })
        .collect();
    let results: Vec<Result<Vec<SweepPoint>>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs.iter().map(|&(rep, kind)| s.spawn(move || run_sweep(cfg, rep, kind))).collect();
        handles.into_iter().map(|h| h.join().expect("sweep thread panicked")).collect()
    });
    let mut report = ExperimentReport::default();
    for (&(_, kind), result) in jobs.iter().zip(results) {
        let points = result?;
        match kind {
            SweepKind::Pairwise => report.m_sweep.extend(points),
            SweepKind::CertaintyEquivalent => report.k_sweep.extend(points),
            SweepKind::Radius => report.r_sweep.extend(points),
        }
    }
    Ok(report)
}

/// One sweep of one replication.
pub fn run_sweep(cfg: &ExperimentConfig, replication: usize, kind: SweepKind) -> Result<Vec<SweepPoint>> {
    let seed = cfg.seed.wrapping_add(replication as u64);
    let radius = cfg.radius;
    let mut session = ElicitationSession::new(cfg.base_model(radius)?, SimulatedDM::default(), seed, cfg.tau_max)?;
    let mut points = Vec::new();
    let at = |parameter: f64| move |e: Error| Error::SweepPoint { sweep: kind.as_str(), parameter, replication, source: Box::new(e) };
    match kind {
        SweepKind::Pairwise => {
            let mut asked = 0;
            for (i, &m) in cfg.m_sweep.iter().enumerate() {
                let extra_ce = if i == 0 { cfg.fixed_k } else { 0 };
                session.run(m - asked, extra_ce).map_err(at(m as f64))?;
                asked = m;
                points.push(measure(cfg, session.model(), kind, replication, seed, m as f64).map_err(at(m as f64))?);
            }
        }
        SweepKind::CertaintyEquivalent => {
            let mut asked = 0;
            for (i, &k) in cfg.k_sweep.iter().enumerate() {
                let extra_m = if i == 0 { cfg.fixed_m } else { 0 };
                session.run(extra_m, k - asked).map_err(at(k as f64))?;
                asked = k;
                points.push(measure(cfg, session.model(), kind, replication, seed, k as f64).map_err(at(k as f64))?);
            }
        }
        SweepKind::Radius => {
            let first = cfg.r_sweep[0];
            session.run(cfg.fixed_m, cfg.fixed_k).map_err(at(first))?;
            for &r in &cfg.r_sweep {
                let model = session.model().with_radius(r).map_err(at(r))?;
                points.push(measure(cfg, &model, kind, replication, seed, r).map_err(at(r))?);
            }
        }
    }
    Ok(points)
}

fn measure(cfg: &ExperimentConfig, model: &AmbiguityModel, sweep: SweepKind, replication: usize, seed: u64, parameter: f64) -> Result<SweepPoint> {
    let out = prgsr(model, &cfg.prospect, &cfg.robust)?;
    let v = &out.consistent_case.value;
    let truth = discretized_truth(v.breakpoints())?;
    let mut sup_distance = 0.0f64;
    for &xi in cfg.prospect.support() {
        let z = xi - out.rho;
        sup_distance = sup_distance.max((v.eval(z)? - truth.eval(z)?).abs());
    }
    let (lo, hi) = (model.domain.lower, model.domain.upper);
    let n = cfg.sample_points;
    let value_samples = (0..n)
        .map(|i| {
            let y = if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
            Ok((y, v.eval(y)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepPoint {
        sweep,
        replication,
        seed,
        parameter,
        n_pairwise: model.pairwise.len(),
        n_ce: model.ce.len(),
        rho: out.rho,
        h_at_rho: out.h_at_rho,
        iterations: out.iterations,
        sup_distance,
        slice_gap: out.slice_gap,
        consistent_gap: out.consistent_gap,
        value_samples,
        w_minus_slopes: out.consistent_case.w_minus.slopes().to_vec(),
        w_plus_slopes: out.consistent_case.w_plus.slopes().to_vec(),
        worst_case: out.consistent_case,
    })
}

/// Column order of the per-sweep CSV files.
pub const CSV_HEADER: [&str; 10] = ["replication", "seed", "parameter", "n_pairwise", "n_ce", "rho", "h_at_rho", "sup_distance", "slice_gap", "consistent_gap"];

#[derive(Serialize)]
struct CsvRow {
    replication: usize,
    seed: u64,
    parameter: f64,
    n_pairwise: usize,
    n_ce: usize,
    rho: f64,
    h_at_rho: f64,
    sup_distance: f64,
    slice_gap: f64,
    consistent_gap: f64,
}

/// Writes `<sweep>.csv` for every sweep (a header alone when the sweep is
/// empty) and one JSON file per point under `tuples/`. Returns the paths
/// written, in a fixed order.
pub fn emit_outputs(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir.join("tuples"))?;
    let mut written = Vec::new();
    for kind in SweepKind::ALL {
        let path = dir.join(format!("{}.csv", kind.as_str()));
        let mut w = csv::WriterBuilder::new().has_headers(false).from_path(&path)?;
        w.write_record(CSV_HEADER)?;
        for p in report.sweep(kind) {
            w.serialize(CsvRow {
                replication: p.replication,
                seed: p.seed,
                parameter: p.parameter,
                n_pairwise: p.n_pairwise,
                n_ce: p.n_ce,
                rho: p.rho,
                h_at_rho: p.h_at_rho,
                sup_distance: p.sup_distance,
                slice_gap: p.slice_gap,
                consistent_gap: p.consistent_gap,
            })?;
        }
        w.flush()?;
        written.push(path);
    }
    for kind in SweepKind::ALL {
        for rep in report.replication_ids(kind) {
            for (i, p) in report.replication(kind, rep).into_iter().enumerate() {
                let path = dir.join("tuples").join(format!("{}_rep{}_pt{}.json", kind.as_str(), rep, i));
                fs::write(&path, serde_json::to_string_pretty(p)?)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

impl ExperimentReport {
    fn replication_ids(&self, kind: SweepKind) -> Vec<usize> {
        let mut ids: Vec<usize> = self.sweep(kind).iter().map(|p| p.replication).collect();
        ids.dedup();
        ids
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig { m_sweep: vec![3], k_sweep: Vec::new(), r_sweep: Vec::new(), fixed_k: 2, sample_points: 11, ..ExperimentConfig::default() }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let none = ExperimentConfig { m_sweep: Vec::new(), k_sweep: Vec::new(), r_sweep: Vec::new(), ..ExperimentConfig::default() };
        assert!(none.validate().is_err());
        assert!(ExperimentConfig { m_sweep: vec![5, 5], ..small() }.validate().is_err());
        assert!(ExperimentConfig { r_sweep: vec![-0.1], ..small() }.validate().is_err());
        assert!(ExperimentConfig { replications: 0, ..small() }.validate().is_err());
        assert!(ExperimentConfig::default().validate().is_ok());
    }

    #[test]
    fn defaults_describe_the_reference_study() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.m_sweep, vec![5, 20, 40, 60, 80, 100]);
        assert_eq!(cfg.k_sweep, cfg.m_sweep);
        assert_eq!(cfg.r_sweep, vec![0.16, 0.08, 0.04, 0.02, 0.01, 0.0]);
        assert_eq!((cfg.fixed_m, cfg.fixed_k, cfg.radius), (5, 5, 0.01));
        assert_eq!(cfg.weighting_grid.len(), 11);
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = ExperimentConfig::default();
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        let partial: ExperimentConfig = serde_json::from_str(r#"{"seed": 9, "r_sweep": [0.05]}"#).unwrap();
        assert_eq!(partial.seed, 9);
        assert_eq!(partial.m_sweep, cfg.m_sweep);
    }

    #[test]
    fn empty_sweeps_give_header_only_csv_and_one_point_gives_one_row() {
        let report = run_experiment(&small()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        emit_outputs(&report, dir.path()).unwrap();
        let header = CSV_HEADER.join(",");
        for name in ["k_sweep.csv", "r_sweep.csv"] {
            assert_eq!(fs::read_to_string(dir.path().join(name)).unwrap().trim_end(), header);
        }
        let m = fs::read_to_string(dir.path().join("m_sweep.csv")).unwrap();
        let lines: Vec<&str> = m.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], header);
        assert!(dir.path().join("tuples/m_sweep_rep0_pt0.json").exists());
        let p = &report.m_sweep[0];
        assert_eq!((p.n_pairwise, p.n_ce), (3, 2));
        assert_eq!(p.value_samples.len(), 11);
        assert_eq!(p.w_minus_slopes.len(), 10);
    }

    #[test]
    fn identical_seeds_give_identical_files() {
        let cfg = small();
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let fa = emit_outputs(&run_experiment(&cfg).unwrap(), a.path()).unwrap();
        let fb = emit_outputs(&run_experiment(&cfg).unwrap(), b.path()).unwrap();
        assert_eq!(fa.len(), fb.len());
        for (x, y) in fa.iter().zip(&fb) {
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
        }
    }

    #[test]
    fn median_of_even_count_averages_the_middle() {
        let mut report = run_experiment(&ExperimentConfig { replications: 2, ..small() }).unwrap();
        report.m_sweep[0].sup_distance = 1.0;
        report.m_sweep[1].sup_distance = 3.0;
        assert_eq!(report.median_distance(SweepKind::Pairwise, 3.0), Some(2.0));
        assert_eq!(report.median_distance(SweepKind::Pairwise, 4.0), None);
    }
}
