//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("generators {row_a} and {row_b} anticommute")]
    NonCommutingRows { row_a: usize, row_b: usize },

    #[error("row {row} is GF(2)-dependent on earlier rows")]
    RankDeficient { row: usize },

    #[error("syndrome {syndrome:?} has no entry in the correction table")]
    UncorrectableSyndrome { syndrome: Vec<bool> },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("measurement window of {got} outcomes does not cover dependency span {need}")]
    SpanTooSmall { need: usize, got: usize },

    #[error(
        "polynomial-only elimination stuck at row {row}, column {column}: \
         column gcd {gcd} is not a monomial; entries would become Laurent series"
    )]
    SeriesEntries { row: usize, column: usize, gcd: String },

    #[error("lattice size cap exceeded: L={l} > {cap}")]
    CapExceeded { l: usize, cap: usize },

    #[error("resource state already consumed")]
    ConsumedResource,
}

pub type Result<T> = std::result::Result<T, Error>;
