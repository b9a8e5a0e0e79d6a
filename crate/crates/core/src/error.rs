use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // presentation validation
    #[error("bracket table is not antisymmetric at ({i}, {j})")]
    Antisymmetry { i: usize, j: usize },
    #[error("Jacobi identity fails for basis triple ({i}, {j}, {k})")]
    JacobiViolation { i: usize, j: usize, k: usize },
    #[error("filtration violated: [V{i}, V{j}] leaves level {level}")]
    FiltrationViolation { i: usize, j: usize, level: usize },
    #[error("tail span starting at V{start} is not an ideal")]
    NotAnIdeal { start: usize },
    #[error("nilpotency step {step} exceeds the supported maximum of 4")]
    StepTooLarge { step: usize },
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    // group arithmetic
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("elements belong to different presentations")]
    PresentationMismatch,
    #[error("character {0:?} is not horizontal")]
    NotHorizontal(Vec<i64>),

    // sequences
    #[error("coefficient ({j}, {k}) violates filtration membership at coordinate {coord}")]
    Membership { j: usize, k: usize, coord: usize },
    #[error("sequence is not polynomial: residual {residual} at ({n}, {h})")]
    FitResidual { n: i64, h: i64, residual: f64 },

    // sieve
    #[error("range [{lo}, {hi}) is invalid: {why}")]
    BadRange { lo: u64, hi: u64, why: &'static str },
    #[error("corrupt cache file: {0}")]
    CorruptCache(String),
    #[error("io: {0}")]
    Io(String),

    // generic argument validation
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("lookup table does not cover {needed} (covers up to {have})")]
    TableCoverage { needed: u64, have: u64 },
    #[error("{0}")]
    Degenerate(String),

    // factorization
    #[error("denominator {got} exceeds cap {cap}")]
    DenominatorCap { got: u64, cap: u64 },
    #[error("iteration count exceeded group dimension")]
    IterationOverflow,
    #[error("multiplicativity fails at n = {0}")]
    NotMultiplicative(u64),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
