use thiserror::Error;

/// Errors produced by the exact engine.
#[derive(Debug, Error)]
pub enum CoxError {
    #[error("invalid field level L = {0}; need L >= 2")]
    InvalidFieldLevel(u32),

    #[error("division by zero in the ground field")]
    DivisionByZero,

    #[error("invalid Coxeter label {0}; labels must be integers >= 2 or infinity")]
    InvalidLabel(String),

    #[error("Coxeter system ({0}) is {1}, not hyperbolic; only hyperbolic triples are supported")]
    NotHyperbolic(String, &'static str),

    #[error("ball radius {requested} exceeds the configured cap {cap}")]
    RadiusCapExceeded { requested: u32, cap: u32 },

    #[error("window {requested} exceeds the configured cap {cap}")]
    WindowCapExceeded { requested: u32, cap: u32 },

    #[error("window of size {window} too small: {context}")]
    WindowTooSmall { window: u32, context: String },

    #[error("point is not timelike")]
    NotTimelike,

    #[error("point lies on the negative sheet of the hyperboloid")]
    WrongSheet,

    #[error("spacelike point rejected")]
    SpacelikePoint,

    #[error("matrix does not preserve the Gram form")]
    NotAnIsometry,

    #[error("element is not a reflection")]
    NotAReflection,

    #[error("element is not a member of the noncrossing partition interval")]
    NotAMember,

    #[error("operand has rank {0}, expected rank 2")]
    RankMismatch(u8),

    #[error("word contains letter {0:?}; expected a, b, c (lowercase) or A, B, C (inverses)")]
    BadLetter(char),

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, CoxError>;
