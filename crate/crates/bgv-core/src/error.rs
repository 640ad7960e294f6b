use thiserror::Error;

#[derive(Debug, Error)]
pub enum BgvError {
    #[error(transparent)]
    Ring(#[from] rns_ring::RingError),
    #[error("plaintext modulus {t} shares a factor with chain prime {q}")]
    PlainModulusNotCoprime { t: u64, q: u32 },
    #[error("ciphertext level {level} outside 1..={max}")]
    BadLevel { level: usize, max: usize },
    #[error("cannot drop below one active prime")]
    ChainBottom,
    #[error("ciphertext has {parts} parts, expected {expected}")]
    PartCount { parts: usize, expected: usize },
    #[error("plaintext moduli differ: {left} vs {right}")]
    PlainModulusMismatch { left: u64, right: u64 },
    #[error("levels differ: {left} vs {right}; align before combining")]
    LevelMismatch { left: usize, right: usize },
    #[error("secret hamming weight {weight} exceeds ring degree {n}")]
    BadSecretWeight { weight: usize, n: usize },
    #[error("slot packing unsupported: 2*l = {two_ell} does not divide p - 1 = {p_minus_1}")]
    PackingUnsupported { two_ell: u64, p_minus_1: u64 },
    #[error("slot count mismatch: got {got}, packing has {expected}")]
    SlotCount { got: usize, expected: usize },
    #[error("value {value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },
}
