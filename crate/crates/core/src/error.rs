use thiserror::Error;

use crate::netsim::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands belong to different fields (F_{left} vs F_{right})")]
    FieldMismatch { left: u32, right: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not a supported prime modulus (need 2 < q < 2^31)")]
    NotPrime(u64),
    #[error("no primitive {order}-th root of unity in F_{q}")]
    NoSuchRoot { q: u32, order: usize },

    #[error("dimension mismatch: {0}")]
    DimensionError(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("evaluation points are not pairwise distinct")]
    DuplicatePoints,
    #[error("{value} is out of range for {digits} base-{base} digits")]
    OutOfRange { value: usize, digits: usize, base: usize },

    #[error("model violation: {0}")]
    Violation(Violation),
    #[error("protocol did not terminate within {limit} rounds")]
    NonTermination { limit: usize },
    #[error("run was executed without tracing")]
    NoTrace,
    #[error("invalid system configuration: {0}")]
    BadConfig(String),

    #[error("degenerate instance: {0}")]
    Degenerate(String),
    #[error("processor {processor} is missing prepared packet x_{missing}")]
    IncompletePrepare { processor: usize, missing: usize },

    #[error("K = {k} is not a power of p + 1 = {base}")]
    NotAPower { k: usize, base: usize },
    #[error("digit {digit} is not a valid base-{base} digit")]
    BadDigit { digit: usize, base: usize },
    #[error("K = {k} processors need K <= q - 1 = {max}")]
    TooManyProcessors { k: usize, max: usize },
    #[error("bad evaluation map: {0}")]
    BadPhi(String),
    #[error("K = {k} does not divide N = {n}")]
    BadPartition { k: usize, n: usize },

    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Self {
        Error::Violation(v)
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
