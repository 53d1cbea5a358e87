//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("LFSR state is all-zero (degenerate fixed point)")]
    DegenerateLfsrState,
    #[error("invalid LFSR spec: {0}")]
    InvalidLfsrSpec(String),
    #[error("{what} = {value} is not a power of two")]
    NotPowerOfTwo { what: &'static str, value: u64 },
    #[error("symbol {symbol} out of range for half-size {m}")]
    SymbolOutOfRange { symbol: u32, m: u32 },
    #[error("state index {index} out of range for signal set of size {size}")]
    IndexOutOfRange { index: u32, size: u32 },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid mapping table: {0}")]
    InvalidMapping(String),
    #[error("empty period list")]
    EmptyPeriodList,
    #[error("invalid key material: {0}")]
    InvalidKey(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid probability {value}")]
    InvalidProbability { value: f64 },
    #[error("invalid priors: {0}")]
    InvalidPriors(String),
    #[error("weights do not form a distribution: {0}")]
    WeightMismatch(String),
    #[error("quadrature failed to reach tolerance (residual {residual:e})")]
    QuadratureTolerance { residual: f64 },
    #[error("Gram matrix not positive semidefinite (eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },
    #[error("degenerate hypothesis pair: probabilities are equal, threshold undefined")]
    DegeneratePair,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("exhaustive mode supports N <= {limit}, got {n}; use the bound operations instead")]
    ExhaustiveLimit { n: u64, limit: u64 },
    #[error("target entropy {target} exceeds 1; no delta exists")]
    InfeasibleDelta { target: f64 },
    #[error("precision context has {bits} fractional bits; the solver path requires >= {required}")]
    PrecisionTooLow { bits: u32, required: u32 },
    #[error("bisection failed to converge within {iterations} iterations")]
    NoConvergence { iterations: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
