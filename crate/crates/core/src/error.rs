use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or input violates an operation's precondition.
    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },

    /// Malformed input document.
    #[error("{context}: {message}")]
    Schema { context: String, message: String },

    /// Work estimate exceeds the configured limit.
    #[error("{what} needs {needed:.3e} steps, above the guard of {guard:.3e}{hint}")]
    GuardExceeded { what: String, needed: f64, guard: f64, hint: String },

    /// t(N_{4,q}, W) vanishes, so the profile ratio for `q` is undefined.
    #[error("t(N(4,{q}), W) vanishes (|t| = {value:e}); the kernel is outside the profile domain for q = {q}")]
    VanishingDenominator { q: usize, value: f64 },

    #[error("eigensolver did not converge on a {size}x{size} matrix")]
    EigenFailure { size: usize },

    /// A reduction identity check failed.
    #[error("identity violated: {0}")]
    IdentityViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// How a failure should be reported to a command-line caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Numeric,
}

impl Error {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid { field: field.into(), message: message.into() }
    }

    pub fn schema(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema { context: context.into(), message: message.into() }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Invalid { .. } | Error::Schema { .. } | Error::Io(_) => ErrorClass::Validation,
            Error::GuardExceeded { .. }
            | Error::VanishingDenominator { .. }
            | Error::EigenFailure { .. }
            | Error::IdentityViolation(_) => ErrorClass::Numeric,
        }
    }
}
