use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Clifford dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("grade {grade} out of range for Cl_{m}")]
    GradeOutOfRange { grade: usize, m: usize },

    #[error("expected a grade-1 element")]
    NotAVector,

    #[error("a Spin element needs an even number of unit vector factors, got {0}")]
    OddFactorCount(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument on the branch cut: {0}")]
    BranchCut(String),

    #[error("Bessel argument |z| = {abs} exceeds the configured bound {bound}")]
    BesselArgumentTooLarge { abs: f64, bound: f64 },

    #[error("radial moment with exponent {0} diverges")]
    DivergentMoment(f64),

    #[error("monogenic null space has dimension {found}, expected {expected}")]
    RankDeficiency { found: usize, expected: usize },

    #[error("basis index {idx} out of range (dimension {dim})")]
    InvalidIndex { idx: usize, dim: usize },

    #[error("kernel series did not converge within {k_max} terms")]
    TruncationFailure { k_max: usize },

    #[error("expected a unit vector, got norm {0}")]
    NonUnitVector(f64),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
