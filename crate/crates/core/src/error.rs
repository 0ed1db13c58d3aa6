use thiserror::Error;

/// Errors raised by the linear-program solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("row {row} has {actual} coefficients, expected {expected}")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        actual: usize,
    },
    #[error("non-finite coefficient in linear program")]
    NonFiniteInput,
    #[error("simplex did not terminate within {0} pivots")]
    IterationLimit(usize),
    #[error("solution violates constraint {row} by {violation:e}")]
    Numerical { row: usize, violation: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("a game needs at least one player")]
    NoPlayers,
    #[error("{players} players exceeds the supported maximum of {max}")]
    TooManyPlayers { players: usize, max: usize },
    #[error("value table has {actual} entries, expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("the empty coalition must be worth 0, got {0}")]
    NonzeroEmptyCoalition(f64),
    #[error("non-finite value for coalition mask {0}")]
    NonFiniteValue(usize),
    #[error("allocation has {actual} entries, expected {expected}")]
    AllocationLength { expected: usize, actual: usize },
    #[error("coalition mask {mask:#b} is outside the {players}-player set")]
    CoalitionOutOfRange { mask: u32, players: usize },
    #[error("blocks overlap on mask {0:#b}")]
    Overlap(u32),
    #[error("blocks do not cover players {0:#b}")]
    IncompleteCover(u32),
    #[error("empty block")]
    EmptyBlock,
    #[error("game is not simple (values must lie in {{0, 1}} with v(N) = 1)")]
    NotSimpleGame,
    #[error("allocation is not an imputation")]
    NotAnImputation,
    #[error("imputation set is empty: singleton values sum to {singletons}, above v(N) = {grand}")]
    EmptyImputationSet { singletons: f64, grand: f64 },
    #[error("{what} = {value} outside supported range {min}..={max}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },
    #[error("coalition collections cover different players")]
    PlayerSetMismatch,
    #[error("unsupported size {0}")]
    UnsupportedSize(usize),
    #[error("estate {estate} exceeds total claims {claims}")]
    EstateExceedsClaims { estate: f64, claims: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("parent pointers contain a cycle through relay {0}")]
    CycleDetected(usize),
    #[error("merge-and-split exceeded {0} steps")]
    NonTermination(usize),
    #[error("linear program: {0}")]
    Lp(#[from] LpError),
    #[error("linear program unexpectedly {0}")]
    LpStatus(&'static str),
}
