//! Crate-wide error type.

use crate::field::FieldId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldId, FieldId),
    #[error("division by zero")]
    DivisionByZero,
    #[error("characteristic {p} divides {n}!; the inverse factorial is undefined")]
    CharDividesFactorial { n: u64, p: u64 },
    #[error("{p} is not prime")]
    NotPrime { p: u64 },
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("division by the zero function")]
    DivisionByZeroFunction,
    #[error("substituted denominator is identically zero")]
    SubstitutedDenominatorZero,
    #[error("denominator has a non-monomial factor; no finite Laurent expansion at the origin")]
    NotLaurent,
    #[error("chart mismatch: operands live over different coordinates or fields")]
    ChartMismatch,
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is singular over the fraction field")]
    SingularMatrix,
    #[error("pair ({0},{1}) is not in the declared nerve")]
    PairNotInNerve(usize, usize),
    #[error("tuple {0:?} is not in the declared nerve")]
    TupleNotInNerve(Vec<usize>),
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("no coordinate change declared from chart {from} to chart {to}")]
    MissingCoordinateChange { from: usize, to: usize },
    #[error("cover index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("no chart with index {0} in the cover")]
    UnknownChart(usize),
    #[error("transition cocycle condition fails on triples {0:?}")]
    CocycleCheckFailed(Vec<Vec<usize>>),
    #[error("d-closedness check failed on tuple {0:?}")]
    DClosedCheckFailed(Vec<usize>),
    #[error("bundle is not flag-presented (transitions must be upper triangular)")]
    NotFlagPresented,
    #[error("operation requires a rank-1 bundle, got rank {0}")]
    NotRankOne(usize),
    #[error("coboundary of the witness does not match the invariant difference")]
    WitnessVerificationFailed,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("wrong cover: {0}")]
    WrongCover(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
