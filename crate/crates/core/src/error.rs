use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} sites vs {right} sites")]
    DimensionMismatch { left: usize, right: usize },

    #[error("site count {n} outside the supported range {min}..={max}")]
    SiteCount { n: usize, min: usize, max: usize },

    /// A request exceeded a size cap of the dense or closed-form path.
    #[error("{what} is capped at n = {cap} (requested n = {n})")]
    SizeCap { what: &'static str, n: usize, cap: usize },

    #[error("basis index {index} does not fit in {n} sites")]
    IndexOutOfRange { index: u64, n: usize },

    #[error("invalid site {site} for a {n}-site system")]
    InvalidSite { site: usize, n: usize },

    #[error("invalid site subset: {0}")]
    InvalidSubset(String),

    #[error("invalid letter {0:?}")]
    InvalidLetter(char),

    #[error("variant {variant} out of range (word admits {count} variants)")]
    VariantOutOfRange { variant: u64, count: u64 },

    #[error("weights are not normalized: |w1|^2 + |w2|^2 = {0}")]
    NotNormalized(f64),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("spin scale must be positive and finite (got {0})")]
    InvalidSpinScale(f64),

    #[error("matrix is not Hermitian (max defect {0:e})")]
    NotHermitian(f64),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("inconsistent GHZ placement: {0}")]
    InvalidPlacement(String),

    #[error("grid needs at least 2 steps (got {0})")]
    InvalidSteps(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
