use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid gate {index}: {reason}")]
    InvalidGate { index: usize, reason: String },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("circuit is not preprocessed (read-only proof and delayed output required)")]
    NotPreprocessed,

    #[error("circuit is not amplified")]
    NotAmplified,

    #[error("repetition count must be odd, got {0}")]
    EvenRepetition(usize),

    #[error("{qubits} qubits exceeds the dense limit of {limit}")]
    WidthOverflow { qubits: usize, limit: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("generator {0} has no closed form")]
    NoClosedForm(String),

    #[error("unknown generator label {0:?}")]
    UnknownGenerator(String),

    #[error("logical index {0} is outside the logical index set")]
    InvalidLogicalIndex(String),

    #[error("full M semantics at the last clock step needs the dense engine")]
    NeedsDense,

    #[error("state left the logical space: {0}")]
    LeftLogicalSpace(String),

    #[error("threshold violated: {0}")]
    Threshold(String),

    #[error("schedule error: {0}")]
    Schedule(String),

    #[error("degenerate ground space (gap {0:e})")]
    Degenerate(f64),

    #[error("ratio undefined: m = 0")]
    ZeroDepth,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
