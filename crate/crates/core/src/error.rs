use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the library. The CLI surfaces these
/// verbatim, so the messages are meant to be read by people.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime {0} is outside the supported range (p < 65536)")]
    PrimeTooLarge(u64),
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("division by zero")]
    DivisionByZero,
    #[error("the rational field cannot be enumerated")]
    InfiniteField,
    #[error("cannot parse scalar {0:?}")]
    ParseScalar(String),

    #[error("duplicate element {0:?}")]
    DuplicateElement(String),
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("order relation has a cycle through {0:?} and {1:?}")]
    CycleDetected(String, String),
    #[error("{0:?} is not below {1:?}")]
    NotComparable(String, String),
    #[error("poset is empty")]
    EmptyPoset,
    #[error("deleting the element would leave an empty poset")]
    WouldBeEmpty,

    #[error("operands live in different incidence algebras")]
    MixedAlgebras,
    #[error("element is not invertible: diagonal entry at {0:?} vanishes")]
    NotInvertible(String),
    #[error("element is not a primitive idempotent")]
    NotPrimitive,

    #[error("linear map is singular")]
    Singular,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cocycle condition fails on {0:?} <= {1:?} <= {2:?}")]
    CocycleViolation(String, String, String),
    #[error("cocycle value at ({0:?}, {1:?}) is zero")]
    ZeroValue(String, String),
    #[error("map is not an automorphism: {0}")]
    NotAutomorphism(String),

    #[error("exhaustive enumeration too large: {size} points exceeds {limit}")]
    TooLargeForExhaustive { size: u128, limit: u128 },
    #[error("poset is not connected")]
    NotConnected,
    #[error("no automorphism of the poset maps {0:?} to {1:?}")]
    NoPreserver(String, String),
    #[error("bad options: {0}")]
    BadOptions(String),
    #[error("instance exceeds brute-force budget: {0}")]
    TooLarge(String),

    #[error("malformed input: {0}")]
    Format(String),
    #[error("echoed basis does not match the canonical basis order")]
    BasisMismatch,
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
