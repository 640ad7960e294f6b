//! NTT-friendly prime chains.
//!
//! A chain prime for ring degree N = 2^n_log satisfies q = 1 (mod 2N), so
//! Z_q contains a primitive 2N-th root of unity psi and negacyclic NTTs of
//! length N exist.  Chains are generated by scanning candidates
//! k * 2N + 1 downward from the top of the requested bit window, keeping
//! the primes in strictly descending order.

use crate::error::RingError;
use crate::mont::{inv_mod, inv_mod_2_32, mul_mod_u32, pow_mod};

/// One modulus of a chain, with the constants the arithmetic paths need.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NttPrime {
    /// The modulus.
    pub q: u32,
    /// log2 of the ring degree this prime supports.
    pub n_log: u32,
    /// Number of fixed low bits of q (n_log + 1): the pattern 0...01.
    pub low_fixed: u32,
    /// -q^(-1) mod 2^32, for the generic REDC path.
    pub neg_q_inv: u32,
    /// 2^64 mod q, for conversion into Montgomery form.
    pub r2: u32,
    /// Primitive 2N-th root of unity, standard form.
    pub psi: u32,
    /// psi^(-1) mod q.
    pub psi_inv: u32,
    /// N^(-1) mod q.
    pub n_inv: u32,
}

impl NttPrime {
    /// Build the constant set for a known chain prime.  Panics if q is not
    /// prime or not 1 mod 2N; chain construction goes through
    /// [`generate_prime_chain`], which only feeds vetted candidates here.
    pub fn new(q: u32, n_log: u32) -> Self {
        let low_fixed = n_log + 1;
        assert!(is_prime_u32(q), "{q} is not prime");
        assert_eq!(q & ((1 << low_fixed) - 1), 1, "{q} != 1 mod 2^{low_fixed}");
        let n = 1u64 << n_log;
        let psi = primitive_root_2n(q, n_log);
        let psi_inv = inv_mod(psi, q);
        let n_inv = inv_mod((n % q as u64) as u32, q);
        let r2 = (((1u128 << 64) % q as u128) as u64) as u32;
        NttPrime {
            q,
            n_log,
            low_fixed,
            neg_q_inv: inv_mod_2_32(q).wrapping_neg(),
            r2,
            psi,
            psi_inv,
            n_inv,
        }
    }

    pub fn n(&self) -> usize {
        1usize << self.n_log
    }

    /// x * 2^32 mod q.
    #[inline]
    pub fn to_mont(&self, x: u32) -> u32 {
        crate::mont::mont_reduce(x as u64 * self.r2 as u64, self.q, self.low_fixed)
    }
}

/// Deterministic Miller-Rabin for u32; the base set {2, 7, 61} is exact for
/// every odd n below 2^32.
pub fn is_prime_u32(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for a in [2u32, 7, 61] {
        if a % n == 0 {
            continue;
        }
        let mut x = pow_mod(a, d as u64, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u32(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest quadratic non-residue raised to (q-1)/2N.  For 2-power N the
/// check psi^N = -1 suffices for psi to be a primitive 2N-th root.
fn primitive_root_2n(q: u32, n_log: u32) -> u32 {
    let n = 1u64 << n_log;
    let half = (q as u64 - 1) / 2;
    let mut g = 2u32;
    while pow_mod(g, half, q) != q - 1 {
        g += 1;
    }
    let psi = pow_mod(g, (q as u64 - 1) / (2 * n), q);
    assert_eq!(pow_mod(psi, n, q), q - 1);
    psi
}

/// Generate `count` descending chain primes of exactly `bits` bits for ring
/// degree 2^n_log.  Candidates are k * 2^(n_log + 1) + 1 scanned from the
/// top of [2^(bits-1), 2^bits).
pub fn generate_prime_chain(
    n_log: u32,
    bits: u32,
    count: usize,
) -> Result<Vec<NttPrime>, RingError> {
    if bits < n_log + 2 || bits > 32 {
        return Err(RingError::BitSizeOutOfRange { bits, n_log });
    }
    let step = 1u64 << (n_log + 1);
    let hi = (1u64 << bits) - 1;
    let lo = 1u64 << (bits - 1);
    let mut k = (hi - 1) / step;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let cand = k * step + 1;
        if cand < lo {
            return Err(RingError::ChainExhausted {
                bits,
                congruence: n_log + 1,
                below: cand,
            });
        }
        if cand <= hi && is_prime_u32(cand as u32) {
            out.push(NttPrime::new(cand as u32, n_log));
        }
        if k == 0 {
            return Err(RingError::ChainExhausted {
                bits,
                congruence: n_log + 1,
                below: lo,
            });
        }
        k -= 1;
    }
    Ok(out)
}

/// The moduli of a full parameter set: the switchable chain q_1..q_L, the
/// key-switching extension p_1..p_k, and one auxiliary prime used by the
/// modulus raise.  All are generated from one descending scan so every
/// modulus is distinct.
#[derive(Debug, Clone)]
pub struct ModulusChain {
    pub q_primes: Vec<NttPrime>,
    pub p_primes: Vec<NttPrime>,
    pub aux: NttPrime,
}

impl ModulusChain {
    pub fn generate(
        n_log: u32,
        bits: u32,
        count_q: usize,
        count_p: usize,
    ) -> Result<Self, RingError> {
        let mut all = generate_prime_chain(n_log, bits, count_q + count_p + 1)?;
        let aux = all.pop().expect("count is at least 1");
        let p_primes = all.split_off(count_q);
        Ok(ModulusChain {
            q_primes: all,
            p_primes,
            aux,
        })
    }

    pub fn all_primes(&self) -> impl Iterator<Item = &NttPrime> {
        self.q_primes
            .iter()
            .chain(self.p_primes.iter())
            .chain(std::iter::once(&self.aux))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_chain_starts_at_97() {
        // n_log = 3: candidates 113, 97, ... inside [64, 128); 113 and 97 are
        // both prime and both 1 mod 16.
        let chain = generate_prime_chain(3, 7, 2).unwrap();
        assert_eq!(chain[0].q, 113);
        assert_eq!(chain[1].q, 97);
        for p in &chain {
            assert_eq!(p.q % 16, 1);
        }
    }

    #[test]
    fn bit_window_too_small_fails() {
        assert_eq!(
            generate_prime_chain(16, 17, 1).unwrap_err(),
            RingError::BitSizeOutOfRange { bits: 17, n_log: 16 }
        );
    }

    #[test]
    fn degree_2_16_chain_is_valid() {
        let chain = generate_prime_chain(16, 32, 4).unwrap();
        for w in chain.windows(2) {
            assert!(w[0].q > w[1].q);
        }
        for p in &chain {
            assert_eq!(p.q & 0x1FFFF, 1);
            assert_eq!(pow_mod(p.psi, 1 << 16, p.q), p.q - 1);
        }
    }

    #[test]
    fn exhaustion_reported() {
        // Only two primes of the form k*16 + 1 exist in [64, 128).
        let err = generate_prime_chain(3, 7, 3).unwrap_err();
        assert!(matches!(err, RingError::ChainExhausted { .. }));
    }

    #[test]
    fn miller_rabin_agrees_with_trial_division() {
        for n in 0..2000u32 {
            let naive = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime_u32(n), naive, "n = {n}");
        }
        assert!(is_prime_u32(0xFFF0_0001));
        assert!(!is_prime_u32(0xFFFE_0001)); // 65535^2
        assert!(!is_prime_u32(0xFFFF_FFFF));
    }
}
