use std::fmt;

use serde::Serialize;

/// Which budget a memory violation broke.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MemoryScope {
    Local,
    Global,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MemoryViolation {
    pub scope: MemoryScope,
    pub context: String,
    pub used: u64,
    pub cap: u64,
    /// Vertex whose ball overflowed, when the violation is per-vertex.
    pub vertex: Option<usize>,
}

impl fmt::Display for MemoryViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scope = match self.scope {
            MemoryScope::Local => "local",
            MemoryScope::Global => "global",
        };
        write!(f, "{scope} memory exceeded in {}: {} > {}", self.context, self.used, self.cap)?;
        if let Some(v) = self.vertex {
            write!(f, " (vertex {v})")?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid graph{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Invariant { line: Option<usize>, msg: String },
    #[error("non-progress: round {round} removed nothing ({remaining} vertices left)")]
    NonProgress { round: usize, remaining: usize },
    #[error("H-partition is incomplete ({unlayered} unlayered vertices)")]
    IncompletePartition { unlayered: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("bound inapplicable: {0}")]
    BoundInapplicable(String),
    #[error("{0}")]
    Memory(MemoryViolation),
    #[error("seed space of 2^{bits} exceeds enumeration budget 2^{budget}")]
    EnumerationBudget { bits: u32, budget: u32 },
    #[error("estimator failure in {context}: achieved {achieved}, required {required}")]
    Estimator { context: String, achieved: String, required: String },
    #[error("improper coloring: edge ({0}, {1}) is monochromatic")]
    ImproperColoring(usize, usize),
    #[error("sparsifier property {property} failed: achieved {achieved}, required {required}")]
    Sparsifier { property: u8, achieved: String, required: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_memory(&self) -> bool {
        matches!(self, Error::Memory(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
