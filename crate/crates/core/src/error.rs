use prgsr_lp::LpStatus;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid prospect: {0}")]
    InvalidProspect(String),
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("argument {value} lies outside the domain [{lower}, {upper}]")]
    OutOfDomain { value: f64, lower: f64, upper: f64 },
    #[error("grid is missing the breakpoint {0}")]
    GridMissingBreakpoint(f64),
    #[error("{side} weighting grid does not contain the cumulative probability {point}")]
    WeightingGridTooCoarse { side: &'static str, point: f64 },
    #[error("bisection did not reach the tolerance within {iterations} iterations")]
    BisectionNotConverged { iterations: usize },
    #[error("bracket violation: constraint is {at_lower} at the lower end and {at_upper} at the upper end")]
    BracketViolation { at_lower: f64, at_upper: f64 },
    #[error("elicited constraints are contradictory: the worst-case program is infeasible at x = {x}")]
    ElicitationInconsistent { x: f64 },
    #[error("worst-case extraction is degenerate: every weight slice with objective mass sits at the positivity floor")]
    ExtractionDegenerate,
    #[error("linear program ended with status {0:?}")]
    Lp(LpStatus),
    #[error("invalid test-function envelope: {0}")]
    InvalidEnvelope(String),
    #[error("elicitation failed: {0}")]
    Elicitation(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("oracle found no feasible grid point at the requested resolution")]
    OracleInfeasible,
    #[error("{sweep} point {parameter} (replication {replication}): {source}")]
    SweepPoint { sweep: &'static str, parameter: f64, replication: usize, source: Box<Error> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
