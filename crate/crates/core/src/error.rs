use thiserror::Error;

pub type Point = (i64, i64);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("theta: duplicate source pair ({0},{1})")]
    DuplicateSource(usize, usize),
    #[error("theta: duplicate target pair ({0},{1})")]
    DuplicateTarget(usize, usize),
    #[error("theta: index out of range in relation ({0},{1}) -> ({2},{3})")]
    OutOfRange(usize, usize, usize, usize),
    #[error("theta: no relation for pair ({0},{1})")]
    MissingPair(usize, usize),
    #[error("pattern has {pattern:?} blue/red letters but the word has degree {degree:?}")]
    PatternMismatch { pattern: (usize, usize), degree: (usize, usize) },
    #[error("expected a {expected} word, found {found}")]
    ColorViolation { expected: &'static str, found: String },
    #[error("letter index {index} out of range for {color} (max {max})")]
    LetterRange { color: &'static str, index: usize, max: usize },
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("group is infinite")]
    InfiniteGroup,
    #[error("not a cycle of theta: {0}")]
    NotACycle(String),
    #[error("pair does not commute: u={u} v={v}")]
    NotCommuting { u: String, v: String },
    #[error("commutation fails at {0:?}")]
    InconsistentCommutation(Point),
    #[error("scalar cocycle fails at {0:?}")]
    CocycleViolation(Point),
    #[error("malformed domain: {0}")]
    MalformedDomain(String),
    #[error("ring-by-tail condition fails at level {0}")]
    TailCondition(i64),
    #[error("3bii compatibility fails at block {0}")]
    Compatibility(i64),
    #[error("horizon {horizon} below soundness bound {bound}")]
    Horizon { horizon: usize, bound: usize },
    #[error("scalars are not constant; normalize first")]
    NonConstantScalars,
    #[error("identification conflict at vertex {0}")]
    IdentificationConflict(String),
    #[error("input graph is not defect free: {0}")]
    NotDefectFree(String),
    #[error("vertices {0} and {1} are not connected")]
    Disconnected(usize, usize),
    #[error("target dimension {0} not reached")]
    TargetNotReached(usize),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
