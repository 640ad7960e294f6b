//! Ciphertexts: evaluation-domain part polynomials over the active prefix
//! of the chain, plus the bookkeeping that decryption needs.

use rns_ring::RnsPoly;

#[derive(Debug, Clone)]
pub struct Ciphertext {
    /// Ciphertext parts; two after every public operation (three-part
    /// tensors are relinearized before they escape an operation).
    pub parts: Vec<RnsPoly>,
    /// Number of active chain primes.
    pub level: usize,
    /// Multiplicative correction factor in Z_t^*: decrypting yields
    /// kappa * m, and decode divides it back out.
    pub kappa: u64,
    /// Plaintext modulus this ciphertext currently encrypts under (the
    /// recryption pipeline walks it down a prime-power ladder).
    pub plain_modulus: u64,
}

impl Ciphertext {
    pub fn n(&self) -> usize {
        self.parts.first().map_or(0, |p| p.n())
    }

    /// Bytes of a dense machine-word serialization: parts x active primes
    /// x N coefficients x 4 bytes.
    pub fn byte_size(&self) -> usize {
        self.parts.len() * self.level * self.n() * 4
    }
}
