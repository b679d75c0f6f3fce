use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("grid dimensions must be positive, got {rows}x{cols}")]
    EmptyGrid { rows: usize, cols: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("qubit count {n} outside supported range [{min}, {max}]")]
    QubitBudget { n: usize, min: usize, max: usize },

    #[error("enumeration over 2^{n} strings exceeds the budget of 2^{max}")]
    EnumerationBudget { n: usize, max: usize },

    #[error("qubit index {index} out of range for {n} qubits")]
    InvalidQubit { index: usize, n: usize },

    #[error("site index {site} out of range for {count} sites")]
    InvalidSite { site: usize, count: usize },

    #[error("operation requires two distinct qubits, got {index} twice")]
    SameQubit { index: usize },

    #[error("schedule dimensions do not match the coupling graph: {0}")]
    ScheduleMismatch(String),

    #[error("assignment is not a bijection: {0}")]
    InvalidAssignment(String),

    #[error("zigzag placement needs at least 2 columns, got {cols}")]
    NarrowGrid { cols: usize },

    #[error("edge-type counts ({sum}) exceed the total edge count {m}")]
    CountsExceedEdges { m: usize, sum: usize },

    #[error("optimal angles are undefined when all type counts are zero")]
    AllZeroCounts,

    #[error("edge count must be positive")]
    ZeroEdges,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("initial simplex is degenerate (affinely dependent points)")]
    DegenerateSimplex,

    #[error("schedule depth {got} is smaller than the cat construction depth {needed}")]
    DepthTooSmall { needed: usize, got: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for config/usage errors, 3 for
    /// resource limits and I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::QubitBudget { .. } | Error::EnumerationBudget { .. } | Error::Io(_) => 3,
            _ => 2,
        }
    }
}
