use thiserror::Error;

/// Errors raised while building, solving or auditing ranking instances.
///
/// Element and function indices carried by variants are 0-based; the
/// `Display` output converts them to the 1-based numbering used by the
/// external formats.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("function {} cannot be covered: f(full set) = {value} < 1", .function + 1)]
    InfeasibleCover { function: usize, value: f64 },
    #[error("weight of function {} is negative or not finite ({weight})", .function + 1)]
    NegativeWeight { function: usize, weight: f64 },
    #[error("all function weights are zero")]
    AllWeightsZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("valuation is not normalized: f(empty set) = {value}")]
    NotNormalized { value: f64 },
    #[error("threshold {} must be positive, got {lambda}", .index + 1)]
    NonPositiveThreshold { index: usize, lambda: f64 },
    #[error("element {} is already in the set", .element + 1)]
    ElementInSet { element: usize },
    #[error("ordering is not a permutation of 1..={m}: {reason}")]
    NotAPermutation { m: usize, reason: String },
    #[error("function {} never reaches its threshold along the ordering", .function + 1)]
    NeverCovered { function: usize },
    #[error("valuation entry {} is negative or not finite ({value})", .index + 1)]
    NegativeValue { index: usize, value: f64 },
    #[error("element {} references universe item {} outside 1..={universe_size}", .element + 1, .item + 1)]
    BadUniverseRef {
        element: usize,
        item: usize,
        universe_size: usize,
    },
    #[error("coverage item weight {} must be positive, got {weight}", .item + 1)]
    NonPositiveItemWeight { item: usize, weight: f64 },
    #[error("normalizer must be positive, got {0}")]
    NonPositiveNormalizer(f64),
    #[error("valuation is not monotone: {0}")]
    NotMonotone(String),
    #[error("valuation is not submodular: {0}")]
    NotSubmodular(String),
    #[error("{what} of size {size} exceeds the limit {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("exhaustive property check needs m <= {limit}, got {m}")]
    TooLargeForExhaustive { m: usize, limit: usize },
    #[error("function {} has no positive marginal value", .function + 1)]
    AllMarginalsZero { function: usize },
    #[error("universe item {} is not contained in any set", .item + 1)]
    UncoverableUniverseItem { item: usize },
    #[error("n must be a perfect square >= 4, got {0}")]
    NotPerfectSquare(usize),
    #[error("bad entry at row {}, column {}: {value} is neither 0 nor {nu}", .row + 1, .column + 1)]
    BadEntry {
        row: usize,
        column: usize,
        value: f64,
        nu: f64,
    },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("trace produced by {found} cannot be audited here; expected {expected}")]
    WrongTraceKind {
        expected: &'static str,
        found: &'static str,
    },
    #[error("bad chain: {0}")]
    BadChain(String),
    #[error("inconsistent trace: {0}")]
    InconsistentTrace(String),
    #[error("invalid instance document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;
