use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameters outside assumption (A1): {0}")]
    ParamsOutsideA1(String),
    #[error("exponent p = {p} outside the admissible range ({lo}, {hi})")]
    ExponentOutsideRange { p: f64, lo: f64, hi: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("expected a field in the {expected} domain, got {found}")]
    TagMismatch { expected: &'static str, found: &'static str },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("truncation geometry infeasible: {0}")]
    Geometry(String),
    #[error("epsilon extrapolation diverged: successive differences {prev:.3e} -> {last:.3e}")]
    ExtrapolationDiverged { prev: f64, last: f64 },
    #[error("no convergence after {iterations} iterations (grad_norm {grad_norm:.3e})")]
    NoConvergence { iterations: usize, grad_norm: f64 },
    #[error("iterate collapsed to zero (norm {0:.3e})")]
    DegenerateCollapse(f64),
    #[error("consistency failure: dual defect {dual:.3e}, pde residual {pde:.3e}")]
    ConsistencyFailure { dual: f64, pde: f64 },
    #[error("case mismatch: {0}")]
    CaseMismatch(String),
    #[error("evaluation radius {radius} exceeds the grid Nyquist radius {nyquist}")]
    NyquistViolation { radius: f64, nyquist: f64 },
    #[error("fewer than 4 dyadic shells in the requested range ({0})")]
    InsufficientShells(usize),
    #[error("exponent {0} outside the admissible range of the probe")]
    ExponentOutOfRange(f64),
    #[error("integration step fell below the minimum at r = {0}")]
    StepFailure(f64),
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
