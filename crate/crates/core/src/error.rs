use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic 2 is not supported; the field must have odd order")]
    EvenCharacteristic,
    #[error("modulus {0} exceeds the supported cap 2^63")]
    ModulusTooLarge(u64),
    #[error("modulus {0} is too large for full line enumeration (must be below 2^32)")]
    FieldTooLarge(u64),
    #[error("0 has no multiplicative inverse")]
    ZeroInverse,
    #[error("density {0} is outside (0, 1]")]
    InvalidDensity(f64),
    #[error("requested {len} elements but the field has only {p}")]
    LengthExceedsField { len: u64, p: u64 },
    #[error("element {0} appears more than once")]
    DuplicateElement(u64),
    #[error("element {value} is not a residue modulo {p}")]
    ElementOutOfRange { value: u64, p: u64 },
    #[error("degenerate set: {0}")]
    DegenerateSet(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("operands live over different moduli ({left} vs {right})")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("{what} requires n <= {cap}, got n = {n}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },
    #[error("cannot parse set descriptor {descriptor:?}: bad token {token:?} ({reason})")]
    Descriptor {
        descriptor: String,
        token: String,
        reason: String,
    },
    #[error("invalid histogram: {0}")]
    InvalidHistogram(String),
    #[error("trial {trial} at p = {prime} failed: {source}")]
    TrialFailed {
        prime: u64,
        trial: u64,
        source: Box<Error>,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
