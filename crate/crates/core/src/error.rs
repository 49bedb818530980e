use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("missing value for atom `{0}`")]
    MissingAtom(String),
    #[error("product of two atom-carrying values is not representable")]
    AtomProduct,
    #[error("arity mismatch: expected {expected} variables, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("underdetermined system for branch {branch:?}: rank {rank} < {unknowns} unknowns")]
    Underdetermined {
        branch: Vec<u32>,
        rank: usize,
        unknowns: usize,
    },
    #[error("inconsistent sample at {point:?}: interpolant gives {expected}, sample is {got}")]
    InconsistentSamples {
        point: Vec<i64>,
        expected: String,
        got: String,
    },
    #[error("truncation insufficient: need exponent {needed}, series known below {trunc}")]
    TruncationInsufficient { needed: i64, trunc: i64 },
    #[error("leading coefficient is zero, series is not invertible")]
    NotInvertible,
    #[error("unstable key: genus {g}, {n} points")]
    Unstable { g: u32, n: usize },
    #[error("class exponent {k} outside [0, {n}]")]
    InvalidExponent { k: u32, n: u32 },
    #[error("pivot insertion has descendant level zero")]
    PivotZeroLevel,
    #[error("pivot level {m} below threshold {threshold}")]
    PivotBelowThreshold { m: u32, threshold: u32 },
    #[error("splitting class is not unique: {0:?}")]
    SplittingNotUnique(Vec<u32>),
    #[error("input is not primary")]
    NonPrimary,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("non-zero residue part in pole-basis decomposition")]
    NonzeroResidue,
    #[error("dual routes disagree: {0}")]
    RouteMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
