use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("quadrature on [{a}, {b}] exhausted {limit} subdivisions (error estimate {estimate:e})")]
    SubdivisionLimit {
        a: f64,
        b: f64,
        limit: usize,
        estimate: f64,
    },
    #[error("integrand envelope did not decay below {tail_cut:e} before {ceiling:e}")]
    TailNotDecaying { tail_cut: f64, ceiling: f64 },
    #[error("step halving changed the solution by {deviation:e} (tolerance {tolerance:e})")]
    StepCheckFailed { deviation: f64, tolerance: f64 },
    #[error("argument {value} outside the domain of {function}")]
    DomainError { function: &'static str, value: f64 },
    #[error("{quantity}: closed form {closed} disagrees with quadrature {numeric}")]
    VerificationMismatch {
        quantity: &'static str,
        closed: f64,
        numeric: f64,
    },
    #[error("maximizer {value} left the bracket ({lo}, {hi})")]
    BracketViolation { value: f64, lo: f64, hi: f64 },
    #[error("energy bound violated by {margin:e} at configuration {configuration}")]
    BoundViolation { margin: f64, configuration: String },
    #[error("descent did not converge within {iterations} iterations")]
    OptimizerStall { iterations: usize },
    #[error("{n} particles requested, at most {max} supported")]
    SizeLimit { n: usize, max: usize },
    #[error("beta = {beta} is not below the threshold {threshold}")]
    ThresholdExceeded { beta: f64, threshold: f64 },
    #[error("e*z*tau = {value} is outside the convergence domain")]
    ConvergenceDomain { value: f64 },
    #[error("fit needs at least {required} points, got {got}")]
    FitDegenerate { required: usize, got: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(function: &'static str, value: f64) -> Error {
    Error::DomainError { function, value }
}
