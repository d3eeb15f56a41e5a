use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index out of range: {what} = {index}, allowed {lo}..={hi}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        lo: usize,
        hi: usize,
    },

    #[error("state does not match its grid: {0}")]
    GridMismatch(String),

    #[error("state is discontinuous at vertex {vertex} (jump {jump:e})")]
    Discontinuous { vertex: usize, jump: f64 },

    #[error("time step {dt} does not divide the final time {t_final}")]
    StepMismatch { dt: f64, t_final: f64 },

    #[error("breakpoint {0} is not a grid node")]
    BreakpointOffGrid(f64),

    #[error("exponential weight overflows: max exponent {max_exponent:e}")]
    Overflow { max_exponent: f64 },

    #[error("weighted integrand does not decay on the truncated domain (tail ratio {tail_ratio:e})")]
    NotDecaying { tail_ratio: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("contraction ratio {rho} is not below one")]
    NoContraction { rho: f64 },

    #[error("quadrature domain too short: tail amplitude {tail:e} exceeds {tolerance:e}")]
    QuadratureDomain { tail: f64, tolerance: f64 },

    #[error("too few samples above the noise floor: {found} < {required}")]
    TooFewSamples { found: usize, required: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
