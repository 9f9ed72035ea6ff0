use thiserror::Error;

/// One failed density-matrix invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum DensityViolation {
    NotSquare { rows: usize, cols: usize },
    NotHermitian { residual: f64 },
    Trace { trace: f64 },
    NegativeEigenvalue { eigenvalue: f64 },
}

impl std::fmt::Display for DensityViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NotSquare { rows, cols } => write!(f, "not square ({rows}x{cols})"),
            Self::NotHermitian { residual } => write!(f, "not Hermitian (residual {residual:e})"),
            Self::Trace { trace } => write!(f, "trace {trace} != 1"),
            Self::NegativeEigenvalue { eigenvalue } => {
                write!(f, "negative eigenvalue {eigenvalue:e}")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("structure error: {0}")]
    Structure(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("not a density matrix: {}", join(.0))]
    Density(Vec<DensityViolation>),

    #[error("Kraus completeness violated: residual {residual:e}")]
    Completeness { residual: f64 },

    #[error("Kraus operator {operator} column {column} has {nonzeros} nonzero entries")]
    CoherentColumn {
        operator: usize,
        column: usize,
        nonzeros: usize,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("solver did not converge after {iterations} iterations (best value {best_value})")]
    NonConvergence { best_value: f64, iterations: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join(v: &[DensityViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
