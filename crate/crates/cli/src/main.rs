//! `prgsr` command-line front end.
//!
//! Every subcommand reads an optional JSON config (`--config`), takes a
//! seed where randomness is involved (`--seed`), and either prints JSON to
//! stdout or writes files into `--out`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use prgsr_core::ambiguity::AmbiguityModel;
use prgsr_core::benchmark::{benchmark_prospect, discretized_truth, empty_model, nominal_weighting};
use prgsr_core::elicitation::{ElicitationSession, SimulatedDM};
use prgsr_core::experiment::{emit_outputs, run_experiment, ExperimentConfig};
use prgsr_core::functions::{PLValueFunction, PLWeighting};
use prgsr_core::gsr::{gsr_cpt, BisectionConfig};
use prgsr_core::prospect::Prospect;
use prgsr_core::robust::{prgsr, RobustConfig};
use prgsr_core::verify::{run_verification, truth_breakpoints, VerifyConfig};

#[derive(Parser)]
#[command(name = "prgsr", version, about = "Preference-robust shortfall risk under rank-dependent preferences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON config file; missing fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed overriding the one in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; results go to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Shortfall risk of one value function and weighting pair.
    Gsr(Common),
    /// Robust shortfall risk over an ambiguity model.
    Prgsr {
        #[command(flatten)]
        common: Common,
        /// Elicit this many pairwise questions before solving.
        #[arg(long)]
        pairwise: Option<usize>,
        /// Elicit this many certainty-equivalent questions before solving.
        #[arg(long)]
        ce: Option<usize>,
    },
    /// Run a simulated questionnaire and write its transcript.
    Elicit {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        pairwise: usize,
        #[arg(long, default_value_t = 0)]
        ce: usize,
        /// Largest relative half-width of a certainty-equivalent interval.
        #[arg(long, default_value_t = 0.05)]
        tau_max: f64,
    },
    /// The M, K, and radius sweeps on the reference instance.
    Experiment(Common),
    /// The oracle suite; exits non-zero if any check fails.
    Verify(Common),
}

/// Input of `gsr`. Defaults to the reference instance with the true value
/// function interpolated on 1001 points.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
struct GsrInput {
    prospect: Prospect,
    value: PLValueFunction,
    w_minus: PLWeighting,
    w_plus: PLWeighting,
    bisection: BisectionConfig,
}

impl Default for GsrInput {
    fn default() -> Self {
        let w = nominal_weighting();
        Self {
            prospect: benchmark_prospect(),
            value: discretized_truth(&truth_breakpoints()).expect("reference interpolant is valid"),
            w_minus: w.clone(),
            w_plus: w,
            bisection: BisectionConfig::default(),
        }
    }
}

/// Input of `prgsr`: a model, a prospect, and an optional questionnaire run
/// on top of the model before solving.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
struct PrgsrInput {
    model: AmbiguityModel,
    prospect: Prospect,
    robust: RobustConfig,
    seed: u64,
    pairwise: usize,
    ce: usize,
    tau_max: f64,
}

impl Default for PrgsrInput {
    fn default() -> Self {
        Self { model: empty_model(0.01), prospect: benchmark_prospect(), robust: RobustConfig::default(), seed: 1, pairwise: 0, ce: 0, tau_max: 0.05 }
    }
}

/// Input of `elicit`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
struct ElicitInput {
    model: AmbiguityModel,
    seed: u64,
}

impl Default for ElicitInput {
    fn default() -> Self {
        Self { model: empty_model(0.01), seed: 1 }
    }
}

fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
    }
}

/// Prints `value` or writes it to `<out>/<name>`.
fn emit<T: Serialize>(value: &T, out: Option<&Path>, name: &str) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        None => println!("{text}"),
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(name);
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gsr(c) => {
            let input: GsrInput = load(c.config.as_deref())?;
            let out = gsr_cpt(&input.value, &input.w_minus, &input.w_plus, &input.prospect, &input.bisection)?;
            emit(&out, c.out.as_deref(), "gsr.json")?;
        }
        Command::Prgsr { common: c, pairwise, ce } => {
            let mut input: PrgsrInput = load(c.config.as_deref())?;
            input.seed = c.seed.unwrap_or(input.seed);
            input.pairwise = pairwise.unwrap_or(input.pairwise);
            input.ce = ce.unwrap_or(input.ce);
            let model = if input.pairwise + input.ce > 0 {
                let mut s = ElicitationSession::new(input.model.clone(), SimulatedDM::default(), input.seed, input.tau_max)?;
                s.run(input.pairwise, input.ce)?;
                s.model().clone()
            } else {
                input.model.clone()
            };
            let out = prgsr(&model, &input.prospect, &input.robust)?;
            emit(&out, c.out.as_deref(), "prgsr.json")?;
        }
        Command::Elicit { common: c, pairwise, ce, tau_max } => {
            let input: ElicitInput = load(c.config.as_deref())?;
            let seed = c.seed.unwrap_or(input.seed);
            let mut s = ElicitationSession::new(input.model, SimulatedDM::default(), seed, tau_max)?;
            s.run(pairwise, ce)?;
            emit(&s.transcript(), c.out.as_deref(), "transcript.json")?;
        }
        Command::Experiment(c) => {
            let mut cfg: ExperimentConfig = load(c.config.as_deref())?;
            cfg.seed = c.seed.unwrap_or(cfg.seed);
            let report = run_experiment(&cfg)?;
            match c.out.as_deref() {
                Some(dir) => {
                    for p in emit_outputs(&report, dir)? {
                        eprintln!("wrote {}", p.display());
                    }
                }
                None => emit(&report, None, "")?,
            }
        }
        Command::Verify(c) => {
            let mut cfg: VerifyConfig = load(c.config.as_deref())?;
            cfg.seed = c.seed.unwrap_or(cfg.seed);
            let report = run_verification(&cfg)?;
            print!("{report}");
            if let Some(dir) = c.out.as_deref() {
                emit(&report, Some(dir), "verify.json")?;
            }
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
