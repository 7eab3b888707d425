use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("symbol {symbol} out of range for alphabet of size {m}")]
    SymbolOutOfRange { symbol: usize, m: usize },

    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),

    #[error("memory {requested} below table memory {actual}")]
    MemoryBelowTable { requested: u32, actual: u32 },

    #[error("table of {0} values exceeds the size cap {1}")]
    MemoryOverflow(usize, usize),

    #[error("eigensolver did not converge after {0} iterations")]
    NonConvergence(usize),

    #[error("right-hand side is not mean-zero: integral = {0:e}")]
    NotMeanZero(f64),

    #[error("finite-difference step {0:e} rejected (cancellation)")]
    StepTooSmall(f64),

    #[error("constraint classes are linearly dependent modulo coboundaries (Gram min eigenvalue {0:e})")]
    DependentConstraints(f64),

    #[error("target lies outside the rotation set (Newton diverged: |a| = {norm:e} after {iterations} iterations)")]
    TargetOutsideRotationSet { norm: f64, iterations: usize },

    #[error("chart point ({0}, {1}) outside the open unit square")]
    BoundaryValue(f64, f64),

    #[error("dyadic level mismatch: {0} vs {1}")]
    LevelMismatch(u32, u32),

    #[error("dyadic level {0} exceeds the cap {1}")]
    LevelTooLarge(u32, u32),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
