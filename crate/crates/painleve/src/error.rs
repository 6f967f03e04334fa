//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the symbolic and numeric layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("no derivative image assigned for variable `{0}`")]
    UnknownDerivative(String),

    #[error("substitution makes a denominator vanish identically")]
    SubstitutionPole,

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("undeclared identifier `{0}`")]
    UndeclaredIdentifier(String),

    #[error("derivative tick on non-dependent variable `{0}`")]
    TickOnNonDependent(String),

    #[error("family {family} expects {expected} parameter(s), got {got}")]
    ArityMismatch {
        family: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("affine constraint a0+a1+2*a2+a3+a4 = 1 violated")]
    ConstraintViolated,

    #[error("coefficient of x vanishes identically; cannot lift (y in {{0, 1, t}})")]
    NotLiftable,

    #[error("system cannot be reduced rationally to a second-order equation")]
    NotReducible,

    #[error("value is not a square in the supported coefficient field")]
    NotASquare,

    #[error("transformation denominator vanishes identically at word position {step}")]
    IdenticallySingular { step: usize },

    #[error("condition requires algebraic irrationals outside the supported field")]
    UnsupportedParameterField,

    #[error("P_V classification requires delta != 0")]
    DeltaZero,

    #[error("solution expression may only involve t and parameters, found `{0}`")]
    InvalidSolution(String),

    #[error("integration path passes through the fixed singularity t = {0}")]
    PathThroughFixedSingularity(f64),

    #[error("step size underflow at t = {last_t}")]
    StepSizeUnderflow { last_t: f64 },

    #[error("transformation denominator vanishes at sample {index}")]
    PointwiseSingular { index: usize },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("equation right-hand side is singular at the expansion point")]
    RhsSingularAtSeed,

    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// True for malformed-input errors (CLI exit code 2); the remaining
    /// variants are computational failures (exit code 3).
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::UndeclaredIdentifier(_)
                | Error::TickOnNonDependent(_)
                | Error::ArityMismatch { .. }
                | Error::ConstraintViolated
                | Error::InvalidSolution(_)
                | Error::Usage(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
