use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReesError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("exponent overflow: {0}")]
    ExponentOverflow(String),
    #[error("{0}")]
    Validation(String),
    #[error("operands live in different rings")]
    RingMismatch,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("Groebner basis budget exceeded after {pairs} S-pairs")]
    BudgetExceeded { pairs: usize },
    #[error("exact division failed: {0}")]
    ExactDivision(String),
    #[error("ideal is not proper (contains 1)")]
    ImproperIdeal,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<ReesError>,
    },
}

impl ReesError {
    /// Wraps the error with a provenance label, e.g. the pipeline stage.
    pub fn context(self, context: impl Into<String>) -> Self {
        ReesError::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error with contexts stripped.
    pub fn root(&self) -> &ReesError {
        match self {
            ReesError::Context { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self.root(), ReesError::BudgetExceeded { .. })
    }
}

pub type Result<T, E = ReesError> = std::result::Result<T, E>;
