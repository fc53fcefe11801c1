use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("diagram has {rows} nonzero rows but at most {d} are allowed")]
    TooManyRows { rows: usize, d: usize },

    #[error("rows are not non-increasing: {0:?}")]
    NotAPartition(Vec<usize>),

    #[error("box count mismatch: expected {expected}, found {found}")]
    BoxCountMismatch { expected: usize, found: usize },

    #[error("cannot pad {boxes} boxes to {target} with full columns of height {d}")]
    PaddingInfeasible { boxes: usize, target: usize, d: usize },

    #[error("probability parameter out of range: {0}")]
    InvalidProbability(String),

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: u128, cap: usize },

    #[error("highest-weight space for {label} has dimension {found}, expected {expected}")]
    ProjectorRank {
        label: String,
        expected: usize,
        found: usize,
    },

    #[error("basis failed validation: {0}")]
    BasisInvalid(String),

    #[error("intertwiner null space for {label} has dimension {found}")]
    IntertwinerNullSpace { label: String, found: usize },

    #[error("associated diagram mismatch for {label}: {reason}")]
    AssociatedMismatch { label: String, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("input state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("slot {slot} out of range for a register of dimension {dim}")]
    SlotOutOfRange { slot: usize, dim: usize },

    #[error("branch 0 succeeded; there is nothing to recover")]
    NothingToRecover,

    #[error("diagram {0} is not part of this table")]
    UnknownDiagram(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("session failed after {} metered messages: {source}", transcript.messages.len())]
    Session {
        transcript: Box<crate::harness::Transcript>,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
