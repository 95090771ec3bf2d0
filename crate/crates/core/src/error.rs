use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("symbol `{symbol}` has arity {expected}, got {found} arguments")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },

    #[error("variable `{0}` is not assigned")]
    UnassignedVariable(String),

    #[error("variable `{0}` is not declared")]
    UndeclaredVariable(String),

    #[error("duplicate name `{0}`")]
    Duplicate(String),

    #[error("label `{0}` is not in the domain")]
    UnknownLabel(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("feasible region is empty")]
    InfeasibleRegion,

    #[error("objective is unbounded below")]
    UnboundedObjective,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("star point and program columns are not aligned")]
    IndexMisalignment,

    #[error("sample signature does not match: {0}")]
    SamplerSignatureMismatch(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("resource guard: {what} needs {needed} steps, cap is {cap}")]
    ResourceGuard { what: String, needed: u128, cap: u128 },

    #[error("bad arity: {0}")]
    BadArity(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            Error::Parse { message, .. } => Error::Parse { line, message },
            other => Error::Parse {
                line,
                message: other.to_string(),
            },
        }
    }
}
