use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("point {re}+{im}i is {distance:.3e} from the integration contour (minimum {minimum:.3e})")]
    ContourProximity {
        re: f64,
        im: f64,
        distance: f64,
        minimum: f64,
    },
    #[error("non-finite intermediate value in {0}")]
    NonFinite(&'static str),
    #[error("quadrature did not converge: resolution disagreement {disagreement:.3e} exceeds {tolerance:.3e}")]
    QuadratureDisagreement { disagreement: f64, tolerance: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("branch tracking step too coarse near r = {r}: {detail}")]
    StepTooCoarse { r: f64, detail: String },
    #[error("ambiguous maximizer transfer near r = {r}: candidates at theta = {theta_a} and {theta_b}")]
    AmbiguousTransfer { r: f64, theta_a: f64, theta_b: f64 },
    #[error("tract invariant violated: {0}")]
    TractInvariant(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error("point {re}+{im}i lies outside the domain")]
    OutsideDomain { re: f64, im: f64 },
    #[error("point outside the trusted region: {0}")]
    OutsideTrustRegion(String),
    #[error("no sign change found: {0}")]
    NoSignChange(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl Error {
    /// True for failures of an iterative or adaptive numerical method, as
    /// opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureDisagreement { .. }
                | Error::NonConvergence(_)
                | Error::NoSignChange(_)
                | Error::GridTooCoarse(_)
                | Error::StepTooCoarse { .. }
                | Error::AmbiguousTransfer { .. }
        )
    }
}
