use thiserror::Error;

use crate::circuit::Gate;

/// Errors raised anywhere in the compile / obfuscate / run / attack pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("qubit count {q} out of range 1..={cap}")]
    QubitCount { q: usize, cap: usize },

    #[error("row {row} out of range for {q} qubits")]
    RowOutOfRange { row: usize, q: usize },

    #[error("two-qubit operation on a single row {0}")]
    SameRow(usize),

    #[error("gate {0:?} has no decomposition in the lookup table")]
    UnsupportedGate(Gate),

    #[error("V segment on row {row} would exceed its width of {width} pairs")]
    SegmentOverflow { row: usize, width: usize },

    #[error("two-qubit operation between non-adjacent rows {0} and {1}")]
    NonAdjacentTwoQubitOp(usize, usize),

    #[error("circuit does not fit in {layers} brick layers")]
    LayoutOverflow { layers: usize },

    #[error("empty circuit")]
    EmptyCircuit,

    #[error("segment is not a member of the window alphabet")]
    NotInAlphabet,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("colluder set of size {size} exceeds budget K = {budget}")]
    BudgetExceeded { size: usize, budget: usize },

    #[error("public shapes differ; distinguishing game would be vacuous")]
    ShapeMismatch,

    #[error("exact enumeration needs {0} states, above the cap")]
    StateSpaceTooLarge(u128),

    #[error("bitstring length {0} does not match mask length {1}")]
    LengthMismatch(usize, usize),

    #[error("time unit must be positive, got {0}")]
    NonPositiveTime(f64),

    #[error("unknown server id {0:?}")]
    UnknownServer(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(..) => "DimensionMismatch",
            Error::QubitCount { .. } => "QubitCount",
            Error::RowOutOfRange { .. } => "RowOutOfRange",
            Error::SameRow(_) => "SameRow",
            Error::UnsupportedGate(_) => "UnsupportedGate",
            Error::SegmentOverflow { .. } => "SegmentOverflow",
            Error::NonAdjacentTwoQubitOp(..) => "NonAdjacentTwoQubitOp",
            Error::LayoutOverflow { .. } => "LayoutOverflow",
            Error::EmptyCircuit => "EmptyCircuit",
            Error::NotInAlphabet => "NotInAlphabet",
            Error::InvalidParams(_) => "InvalidParams",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::ShapeMismatch => "ShapeMismatch",
            Error::StateSpaceTooLarge(_) => "StateSpaceTooLarge",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::NonPositiveTime(_) => "NonPositiveTime",
            Error::UnknownServer(_) => "UnknownServer",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
