use alloc::string::String;

/// Which of the two moduli failed a primality check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulus {
    P,
    Q,
}

impl core::fmt::Display for Modulus {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Modulus::P => f.write_str("p"),
            Modulus::Q => f.write_str("q"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(Modulus),
    #[error("q does not divide p - 1, or g does not have order q")]
    OrderMismatch,
    #[error("generator is 1")]
    TrivialGenerator,
    #[error("parameter generation gave up after {0} attempts")]
    GenerationTimeout(usize),
    #[error("invalid bit lengths: q_bits={q_bits}, p_bits={p_bits}")]
    InvalidBitLengths { q_bits: usize, p_bits: usize },
    #[error("value is not invertible mod q")]
    NonInvertible,
    #[error("secret key must be nonzero")]
    ZeroSecret,
    #[error("scalar not below q")]
    ScalarOutOfRange,
    #[error("element outside [1, p)")]
    ElementOutOfRange,
    #[error("element is not in the order-q subgroup")]
    NotInSubgroup,
    #[error("no fixture entry for tag {tag:?} with items [{items}]")]
    FixtureMiss { tag: String, items: String },
    #[error("share point must be nonzero")]
    ZeroPoint,
    #[error("interpolation points are not distinct mod q")]
    DuplicatePoints,
    #[error("point is not part of the subset")]
    NotInSubset,
    #[error("unmasked share is not below q")]
    ShareOutOfRange,
    #[error("verifier's opening does not match its commitment")]
    OpeningMismatch,
    #[error("protocol message received out of order")]
    OutOfOrder,
    #[error("delegation check g^S = y^r * r failed")]
    DelegationCheckFailed,
    #[error("partial signature from signer {0} rejected")]
    PartialRejected(usize),
    #[error("subset point collides with a member point")]
    SubsetPointCollision,
    #[error("need at least {expected} contributions, got {got}")]
    ThresholdMismatch { expected: usize, got: usize },
    #[error("threshold must be at least 1 and at most the group size")]
    InvalidThreshold,
    #[error("unknown member index {0}")]
    UnknownMember(usize),
    #[error("decryption failed integrity check")]
    DecryptionMismatch,
    #[error("interpolated polynomial does not pass through the required points")]
    InterpolationCheckFailed,
    #[error("malformed hex integer")]
    InvalidHex,
    #[error("could not find a blinding value after {0} attempts")]
    BlindingTimeout(usize),
}

pub type Result<T> = core::result::Result<T, Error>;
