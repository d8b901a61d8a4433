use thiserror::Error;

/// Errors raised by the engine. Verification failures are not errors; they
/// are recorded in reports.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("chart mismatch: dimension {left} vs {right}")]
    ChartMismatch { left: usize, right: usize },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("denominator vanishes in {component} at point {point}")]
    DenominatorVanishes { component: String, point: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown scalar generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed chart: {0}")]
    MalformedChart(String),
    #[error("form is not invariant under the symmetry: {0}")]
    NotInvariant(String),
    #[error("beta is not a primitive of F: {0}")]
    NotExact(String),
    #[error("candidate moment map does not satisfy dmu = alpha_I: {0}")]
    MomentMapMismatch(String),
    #[error("alpha_I is not closed: {0}")]
    NotClosed(String),
    #[error("symmetry is null: {0}")]
    NullSymmetry(String),
    #[error("mu - c vanishes identically")]
    PoleEverywhere,
    #[error("coframe element {0} is not basic")]
    NotBasic(usize),
    #[error("forms do not make up a coframe: {0}")]
    NotACoframe(String),
    #[error("derivative not expressible in the coframe: {0}")]
    NotExpressible(String),
    #[error("system has no solution: {0}")]
    Unsolvable(String),
    #[error("metric is degenerate at the point: {0}")]
    DegenerateAtPoint(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("twist data is invalid: {0}")]
    InvalidTwist(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
