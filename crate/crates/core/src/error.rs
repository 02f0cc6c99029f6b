use num_complex::Complex64;
use thiserror::Error;

/// Every failure the library can report. Numeric failures carry enough
/// context for a caller (or the CLI) to decide whether to retry with other
/// parameters.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(
        "lambda = {lambda} lies within {distance:e} of the band [-2i, 2i] (tolerance {tol:e})"
    )]
    BandSpectrum {
        lambda: Complex64,
        distance: f64,
        tol: f64,
    },
    #[error("matrix power A^{exponent} overflows the floating-point range")]
    Overflow { exponent: i64 },
    #[error("exponent {exponent} exceeds the configured limit {limit}")]
    PowerLimit { exponent: i64, limit: u64 },
    #[error("rho_{index} = 0 makes the coefficient undefined")]
    DegenerateRho { index: usize },
    #[error("q + n p = 0 at n = {n}")]
    DegenerateLatticePoint { n: i64 },
    #[error("no convergence: {what} (last change {last_change:e}, limit {limit})")]
    NoConvergence {
        what: &'static str,
        last_change: f64,
        limit: usize,
    },
    #[error("LU factorization failed at pivot {step}")]
    LuFailure { step: usize },
    #[error("lambda = {lambda} is outside the domain: {reason}")]
    Domain {
        lambda: Complex64,
        reason: &'static str,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("operation requires case I_minus, slice is {0}")]
    InvalidCase(String),
    #[error("no positive root found on ({lo}, {hi}]: this contradicts the instability theorem")]
    NoRootFound { lo: f64, hi: f64 },
    #[error("function is not real-valued at x = {x} (f = {value})")]
    NotRealValued { x: f64, value: Complex64 },
    #[error("function vanishes on the contour (min modulus {min_modulus:e})")]
    ZeroOnContour { min_modulus: f64 },
    #[error("root refinement stalled on [{lo}, {hi}]")]
    Stall { lo: f64, hi: f64 },
}

impl Error {
    /// Short machine-readable tag, used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::BandSpectrum { .. } => "BandSpectrum",
            Error::Overflow { .. } => "Overflow",
            Error::PowerLimit { .. } => "PowerLimit",
            Error::DegenerateRho { .. } => "DegenerateRho",
            Error::DegenerateLatticePoint { .. } => "DegenerateLatticePoint",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::LuFailure { .. } => "LUFailure",
            Error::Domain { .. } => "DomainError",
            Error::InvalidInput(_) => "InvalidInput",
            Error::InvalidCase(_) => "InvalidCase",
            Error::NoRootFound { .. } => "NoRootFound",
            Error::NotRealValued { .. } => "NotRealValued",
            Error::ZeroOnContour { .. } => "ZeroOnContour",
            Error::Stall { .. } => "Stall",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
