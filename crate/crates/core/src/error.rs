//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus 0x{modulus:x} of degree {degree} is reducible over GF(2)")]
    ReducibleModulus { modulus: u128, degree: u32 },

    #[error("extension degree {0} outside supported range 1..=64")]
    DegreeOutOfRange(u32),

    #[error("division by zero in GF(2^{0})")]
    DivisionByZero(u32),

    #[error("elements belong to different fields (GF(2^{left}) vs GF(2^{right}))")]
    FieldMismatch { left: u32, right: u32 },

    #[error("sub-degree {sub} does not divide field degree {degree}")]
    NonDivisorSubdegree { sub: u32, degree: u32 },

    #[error("GF(2^{0}) has no primitive cube root of unity (degree is odd)")]
    NoCubeRoot(u32),

    #[error("cube classification undefined: 3 does not divide 2^{0} - 1")]
    NoCubeClassification(u32),

    #[error("element 0x{bits:x} is not in the degree-{sub} subfield of GF(2^{degree})")]
    SubfieldViolation { bits: u64, sub: u32, degree: u32 },

    #[error("coefficient must be nonzero")]
    ZeroCoefficient,

    #[error("factorization of {0} exceeded the iteration budget")]
    FactorizationTimeout(u128),

    #[error("{family}: precondition violated: {clause}")]
    PreconditionViolated { family: &'static str, clause: String },

    #[error("extension degree n = {0} must be odd")]
    EvenExtension(u32),

    #[error("divisor chain broken: {0}")]
    BrokenDivisorChain(String),

    #[error("gcd({d}, {modulus}) = {gcd} != 1, exponent not invertible")]
    NotCoprime { d: u128, modulus: u128, gcd: u128 },

    #[error("polynomial is not a single-term monomial")]
    NonMonomial,

    #[error("scale factor must be nonzero")]
    ZeroScale,

    #[error("u = 0: use the u = 0 inverse form instead")]
    ZeroU,

    #[error("map is not a bijection: f(0x{x1:x}) = f(0x{x2:x})")]
    NotBijective { x1: u64, x2: u64 },

    #[error("field of 2^{degree} elements exceeds the exhaustive cap of {cap} elements")]
    FieldTooLarge { degree: u32, cap: u64 },

    #[error("search space for m = {0} is too large (cap m <= {1})")]
    SearchSpaceTooLarge(u32, u32),

    #[error("invalid serialized form: {0}")]
    InvalidSerialized(String),
}
