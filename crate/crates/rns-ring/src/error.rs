use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("modulus chain exhausted: no {bits}-bit prime with q = 1 mod 2^{congruence} below {below}")]
    ChainExhausted {
        bits: u32,
        congruence: u32,
        below: u64,
    },
    #[error("bit size {bits} out of range for n_log {n_log}: need n_log + 2 <= bits <= 32")]
    BitSizeOutOfRange { bits: u32, n_log: u32 },
    #[error("ring degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("domain mismatch: expected {expected:?}, found {found:?}")]
    DomainMismatch {
        expected: crate::poly::Domain,
        found: crate::poly::Domain,
    },
    #[error("automorphism exponent {k} is invalid: must be odd and in 1..2N")]
    InvalidAutomorphism { k: usize },
    #[error("unsupported NTT shape: N = {n} cannot be split as radix {radix} times a power of two <= radix")]
    UnsupportedShape { n: usize, radix: usize },
}
