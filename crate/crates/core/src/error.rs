use thiserror::Error;

use crate::rotor::SymmetrySpecies;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("truncation N = {0} is too small (need N >= 2)")]
    TruncationTooSmall(usize),
    #[error("coupling magnitude must be finite")]
    NonFiniteCoupling,
    #[error("{0} requires a real barrier (Sturm counting fails for negative off-diagonal products)")]
    RealBarrierRequired(&'static str),
    #[error("level count must be at least 1")]
    NoLevels,
    #[error("tolerance must be positive and finite")]
    InvalidTolerance,
    #[error("tolerance {tol:e} is below what a {digits}-digit field can resolve at |e| = {scale:e}")]
    ToleranceUnreachable { tol: f64, scale: f64, digits: u32 },
    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
    #[error("truncation did not stabilise below the cap N = {cap}")]
    TruncationCap { cap: usize },
    #[error("perturbation series are defined per parity block; {0} is degenerate")]
    DegenerateSpecies(SymmetrySpecies),
    #[error("perturbation order must be even, got {0}")]
    OddOrder(usize),
    #[error("perturbation order {0} exceeds the supported maximum of 40")]
    OrderTooLarge(usize),
    #[error("barrier must be positive, got {0}")]
    NonPositiveBarrier(f64),
    #[error("splitting index must be at least 1")]
    InvalidSplittingIndex,
    #[error("coupling must be nonzero")]
    ZeroCoupling,
    #[error("invalid level pair ({0}, {1}); need lower < upper")]
    InvalidPair(usize, usize),
    #[error("requested {requested} digits but the field carries {available}")]
    PrecisionUnavailable { requested: u32, available: u32 },
    #[error("exceptional-point Newton iteration diverged from the seed")]
    NewtonDivergence,
    #[error("exceptional-point Jacobian is singular (higher-order degeneracy?)")]
    SingularJacobian,
    #[error("g = {g} is not beyond the exceptional point g_e = {g_e}")]
    NotBeyondExceptionalPoint { g: f64, g_e: f64 },
    #[error("lost the complex branch at g = {0}")]
    BranchLost(f64),
    #[error("root scan exhausted its refinement budget")]
    ScanExhausted,
    #[error("invalid scan range [{0}, {1}]")]
    InvalidScanRange(f64, f64),
    #[error("matrix dimension {0} exceeds the dense-oracle limit of 5000")]
    OracleTooLarge(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
