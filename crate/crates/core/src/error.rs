use thiserror::Error;

use crate::ode::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid system: {0}")]
    InvalidSystem(ValidationReport),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("binomial coefficient C({n}, {k}) exceeds 2^63")]
    Overflow { n: usize, k: usize },

    #[error("index {index} out of range for basis of dimension {dim}")]
    IndexOutOfRange { index: u64, dim: u64 },

    #[error("malformed occupation word: {0}")]
    MalformedWord(String),

    #[error("Hermite function overflowed at order {order} (x = {x})")]
    HermiteOverflow { order: usize, x: f64 },

    #[error("observable term has total occupation {total} above cap {cap}")]
    ObservableDegree { total: usize, cap: usize },

    #[error("basis too large: estimated {estimated} stored entries exceeds cap {cap}")]
    BasisTooLarge { estimated: u64, cap: u64 },

    #[error("step size underflow at t = {t} (h = {h}); system may be stiff")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error(
        "Krylov propagation did not converge after {substeps} substeps (residual {residual:e})"
    )]
    KrylovNonConvergence { substeps: usize, residual: f64 },

    #[error("output has imaginary residue {max:e}, above {limit:e}")]
    ImaginaryResidue { max: f64, limit: f64 },

    #[error(
        "phase recovery failed for oscillator {oscillator} at t = {t}: x^2 + y^2 = {radius_sq}"
    )]
    DegeneratePhase {
        oscillator: usize,
        t: f64,
        radius_sq: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
