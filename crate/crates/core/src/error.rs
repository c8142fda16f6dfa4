use thiserror::Error;

/// Errors raised across the solvers, verifiers and the experiment harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("eta' is not positive: min sampled eta' = {min} at u = {at}")]
    NonMonotoneEta { min: f64, at: f64 },
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("derivative of {what} disagrees with finite differences at u = {at} (rel err {err:e})")]
    InconsistentDerivative { what: &'static str, at: f64, err: f64 },
    #[error("u = {u} lies outside the domain [{a}, {b}]")]
    OutOfDomain { u: f64, a: f64, b: f64 },
    #[error("value {v} lies outside the range [{lo}, {hi}]")]
    OutOfRange { v: f64, lo: f64, hi: f64 },
    #[error("target {y} is not bracketed by [{lo}, {hi}] (values {f_lo}, {f_hi})")]
    NotBracketed { y: f64, lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("left and right states coincide (u = {0})")]
    DegenerateStates(f64),
    #[error("flux is not strictly convex: {0}")]
    NotConvex(String),
    #[error("weight function is not positive at u = {0}")]
    NonPositiveWeight(f64),
    #[error("solution left the domain: u = {u} at x = {x}, t = {t}")]
    DomainEscape { u: f64, x: f64, t: f64 },
    #[error("level value left [0, 1]: u = {u} at level {level}, t = {t}")]
    RangeEscape { u: f64, level: i64, t: f64 },
    #[error("CFL condition violated: courant number {0}")]
    CflViolated(f64),
    #[error("characteristic speed changes sign or is negative (min speed {0})")]
    WrongWindDirection(f64),
    #[error("unstable configuration: {0}")]
    UnstableConfig(String),
    #[error("minimized functional is not finite at y = {0}")]
    NonFiniteFunctional(f64),
    #[error("initial potential is not convex near x = {0}")]
    NotConvexInitial(f64),
    #[error("no characteristic reaches x = {x} at t = {t}")]
    NoCharacteristicHits { t: f64, x: f64 },
    #[error("initial data is not monotone near x = {0}")]
    NotMonotoneData(f64),
    #[error("need at least {needed} runs with strictly decreasing h, got {got}")]
    InsufficientRuns { needed: usize, got: usize },
    #[error("least-squares fit is degenerate: {0}")]
    DegenerateFit(String),
    #[error("grids differ: {0}")]
    GridMismatch(String),
    #[error("test function support escapes the candidate window")]
    SupportEscape,
    #[error("u = {u} lies outside the open interval ({a}, {b})")]
    OutOfInterval { u: f64, a: f64, b: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
