use thiserror::Error;

/// Errors raised by validation, tree operations and the search procedures.
///
/// The `Display` form starts with the variant name so that command line users
/// can match on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("EmptySpace")]
    EmptySpace,
    #[error("NotSquare row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("LabelMismatch {labels} labels for {points} points")]
    LabelMismatch { labels: usize, points: usize },
    #[error("DuplicateLabel {0}")]
    DuplicateLabel(String),
    #[error("NegativeEntry {0} {1}")]
    NegativeEntry(String, String),
    #[error("AsymmetricMatrix {0} {1}")]
    AsymmetricMatrix(String, String),
    #[error("TriangleViolation {0} {1} {2}")]
    TriangleViolation(String, String, String),
    #[error("StrongTriangleViolation {0} {1} {2}")]
    StrongTriangleViolation(String, String, String),
    #[error("DefinitenessViolation {0} {1}")]
    DefinitenessViolation(String, String),
    #[error("InvalidTree {0}")]
    InvalidTree(String),
    #[error("OverlappingBlocks")]
    OverlappingBlocks,
    #[error("MixedAmbient")]
    MixedAmbient,
    #[error("PreconditionViolated {0}")]
    PreconditionViolated(String),
    #[error("SurjectionBudgetExceeded limit {0}")]
    SurjectionBudgetExceeded(u64),
    #[error("InjectionBudgetExceeded limit {0}")]
    InjectionBudgetExceeded(u64),
    #[error("GammaBudgetExceeded {blocks} blocks, cap {cap}")]
    GammaBudgetExceeded { blocks: usize, cap: usize },
    #[error("NonIntegerExponent {0}")]
    NonIntegerExponent(String),
    #[error("SizeCapExceeded {nx}x{ny}, cap {cap}")]
    SizeCapExceeded { nx: usize, ny: usize, cap: usize },
    #[error("ParseError {0}")]
    Parse(String),
    #[error("IoError {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
