use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("mismatched primes {0} and {1}")]
    PrimeMismatch(u64, u64),
    #[error("sequence is not Cauchy at index {index}: {reason}")]
    NotCauchy { index: usize, reason: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("state is not homogeneous")]
    NotHomogeneous,
    #[error(
        "chain too short: stabilization to p^-{target} not certified (certified p^-{certified})"
    )]
    InsufficientChain { target: u32, certified: u32 },
    #[error("under-determined fit window: need q-window {needed}, have {have}")]
    UnderDetermined { needed: usize, have: usize },
    #[error("{0} lies in the point spectrum of L(0)")]
    InPointSpectrum(String),
    #[error("precision shortfall: {0}")]
    PrecisionShort(String),
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("degree {degree} exceeds configured cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("malformed value: {0}")]
    Malformed(String),
}
