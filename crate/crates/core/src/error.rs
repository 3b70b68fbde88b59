use thiserror::Error;

/// Errors raised by the LH toolkit.
#[derive(Debug, Error)]
pub enum LhError {
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("dimension {dim} outside supported range {min}..={max}")]
    DimensionOutOfRange { dim: u32, min: u32, max: u32 },
    #[error("index {index} out of range for n = {n}")]
    IndexOutOfRange { index: u64, n: u64 },
    #[error("invalid generator set: {0}")]
    InvalidGenerators(String),
    #[error("hops do not span Z2^{0}: the Cayley graph is disconnected")]
    Disconnected(u32),
    #[error("rank deficient: rank {rank} < {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("partition is not an equipartition: {0}")]
    Unbalanced(String),
    #[error("walsh index 0 does not define an equipartition")]
    ZeroWalshIndex,
    #[error("{what} exceeds limit: {value} > {limit}")]
    TooLarge {
        what: &'static str,
        value: u64,
        limit: u64,
    },
    #[error("search budget of {0} exceeded")]
    BudgetExceeded(u64),
    #[error("invalid code matrix: {0}")]
    InvalidCode(String),
    #[error("singular map: not invertible over GF(2)")]
    SingularMap,
    #[error("invalid construction parameters: {0}")]
    InvalidParams(String),
    #[error("bisection b = {0} is even; odd-b augmentation needs odd b")]
    EvenBisection(u32),
    #[error("no hop substitution found: {0}")]
    NoSubstitution(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("record integrity check failed for d={d} m={m}: {msg}")]
    Integrity { d: u32, m: u32, msg: String },
    #[error("database is empty")]
    EmptyDatabase,
    #[error("no admissible record for the requirement")]
    NoAdmissibleRecord,
    #[error("radix {radix} must exceed hop count m = {m}")]
    RadixTooSmall { radix: u32, m: u32 },
    #[error("division by zero bisection")]
    ZeroBisection,
    #[error("io error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, LhError>;

pub(crate) fn io_err(path: &std::path::Path, source: std::io::Error) -> LhError {
    LhError::Io {
        path: path.display().to_string(),
        source,
    }
}
