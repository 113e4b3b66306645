use core::fmt;

/// Errors shared across the estimation stack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// An argument violated a documented precondition.
    InvalidArgument(&'static str),
    /// A value that must be finite was NaN or infinite.
    NonFinite(&'static str),
    /// Array/parameter layout does not match the model spec.
    DimensionMismatch { expected: usize, got: usize },
    /// The operation needs the rough component, but `Path.p` is absent.
    MissingRough,
    /// Normal equations or a precision matrix failed Cholesky factorization.
    IllConditioned(&'static str),
    /// A trajectory or an SDE integration left the admissible range.
    Diverged(&'static str),
    /// Langevin step size too large for the current (Z, N); the chain blew up.
    StepSizeTooLarge,
    /// The operation is not defined for this model kind.
    UnsupportedModel(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            Error::NonFinite(what) => write!(f, "non-finite value: {what}"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::MissingRough => write!(f, "path has no rough component (P)"),
            Error::IllConditioned(what) => write!(f, "ill-conditioned system: {what}"),
            Error::Diverged(what) => write!(f, "diverged: {what}"),
            Error::StepSizeTooLarge => write!(f, "Langevin step size too large"),
            Error::UnsupportedModel(what) => write!(f, "unsupported model: {what}"),
        }
    }
}

impl core::error::Error for Error {}
