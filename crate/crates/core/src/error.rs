use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum GspError {
    #[error("matrix is not symmetric within tolerance (max deviation {deviation:.3e})")]
    NotSymmetric { deviation: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("input columns are linearly dependent")]
    DependentColumns,

    #[error("no partition into {requested} blocks keeps every block full rank")]
    InfeasiblePartition { requested: usize },

    #[error("quadrature under-resolved: refinement changed a coefficient by {disagreement:.3e}")]
    QuadratureUnderResolved { disagreement: f64 },

    #[error("point {point} lies outside the basis domain")]
    OutOfDomain { point: f64 },

    #[error("signals were built against different shift/basis pairs")]
    BasisMismatch,

    #[error("filter and signal disagree on shift/basis context: {0}")]
    ContextMismatch(String),

    #[error("frequency label 0 has no finite operator eigenvalue; polynomial filters cannot act on it")]
    UnboundedFreqLabel,

    #[error("filter has no finite matrix form on the truncated grid: {0}")]
    NotRepresentable(String),

    #[error("truncation cutoff {cutoff} exceeds grid size {grid}")]
    CutoffOutOfRange { cutoff: usize, grid: usize },

    #[error("sample plan failed to determine the subspace after {attempts} redraws")]
    PlanFailed { attempts: usize },

    #[error("parameter matrix is numerically rank zero; cannot factor")]
    DegenerateFactorization,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, GspError>;
