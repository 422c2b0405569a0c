use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{elem} is not an element of {ring}")]
    NotInRing { elem: String, ring: String },
    #[error("wrong ring kind: {0}")]
    WrongRing(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("degenerate quadratic: the E-matrix is scalar")]
    DegenerateQuad,
    #[error("period matrix eigenvalues have equal absolute value; no attracting fixed point")]
    NonConvergent,
    #[error("no periodicity detected within {0} steps")]
    StepBudgetExceeded(usize),
    #[error("search bound {bound} too small, need at least {need}")]
    BoundTooSmall { bound: String, need: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("norm of the unit is {found}, expected {expected}")]
    NormMismatch { found: String, expected: String },
    #[error("quadratic is reducible over the base field")]
    Reducible,
    #[error("determinant of the target matrix is {0}, expected 1")]
    DetMismatch(String),
    #[error("estimated {estimated} nodes exceeds the budget of {limit}")]
    BudgetExceeded { estimated: u128, limit: u128 },
    #[error("no points to certify")]
    InsufficientPoints,
    #[error("no unit generator supplied and none computable: {0}")]
    NoGenerator(String),
    #[error("time limit of {0} s exceeded")]
    TimeLimitExceeded(u64),
    #[error("invariant violated: {0}")]
    Invariant(String),
}
