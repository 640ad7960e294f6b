//! Big-integer lifts out of an RNS basis.  Used on cold paths only:
//! decryption, key generation constants, and table construction.  Hot
//! paths stay in per-prime machine arithmetic.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rns_ring::mont::inv_mod;
use rns_ring::NttPrime;

#[derive(Debug, Clone)]
pub struct CrtBasis {
    pub primes: Vec<u32>,
    /// Product of all primes.
    pub product: BigInt,
    /// product / primes[i].
    punctured: Vec<BigInt>,
    /// (product / primes[i])^(-1) mod primes[i].
    inv_punctured: Vec<u32>,
}

impl CrtBasis {
    pub fn new(primes: &[NttPrime]) -> Self {
        Self::from_moduli(&primes.iter().map(|p| p.q).collect::<Vec<_>>())
    }

    pub fn from_moduli(moduli: &[u32]) -> Self {
        let product: BigInt = moduli.iter().fold(BigInt::one(), |acc, &q| acc * q);
        let punctured: Vec<BigInt> = moduli.iter().map(|&q| &product / q).collect();
        let inv_punctured = moduli
            .iter()
            .zip(&punctured)
            .map(|(&q, m)| {
                let m_mod_q = ((m % q).to_u32().unwrap()) % q;
                inv_mod(m_mod_q, q)
            })
            .collect();
        CrtBasis {
            primes: moduli.to_vec(),
            product,
            punctured,
            inv_punctured,
        }
    }

    /// Symmetric representative in (-product/2, product/2] of the integer
    /// with the given residues (centered i64, aligned with `primes`).
    pub fn lift_symmetric(&self, residues: &[i64]) -> BigInt {
        assert_eq!(residues.len(), self.primes.len());
        let mut acc = BigInt::zero();
        for ((&r, &q), (m, &inv)) in residues
            .iter()
            .zip(&self.primes)
            .zip(self.punctured.iter().zip(&self.inv_punctured))
        {
            let r_std = if r < 0 { r + q as i64 } else { r } as u64;
            let y = (r_std * inv as u64) % q as u64;
            acc += m * y;
        }
        acc %= &self.product;
        let half = &self.product >> 1;
        if acc > half {
            acc -= &self.product;
        } else if acc < -&half {
            acc += &self.product;
        }
        acc
    }

    /// Centered residue of a big integer modulo m.
    pub fn reduce_centered(v: &BigInt, m: u64) -> i64 {
        let m_big = BigInt::from(m);
        let mut r = v % &m_big;
        if r.is_negative() {
            r += &m_big;
        }
        let mut r = r.to_i64().unwrap();
        if 2 * (r as i128) >= m as i128 {
            r -= m as i64;
        }
        r
    }
}

/// Centered residue of a big integer modulo a u32 prime, as i64.
pub fn big_mod_prime(v: &BigInt, q: u32) -> i64 {
    CrtBasis::reduce_centered(v, q as u64)
}

/// Standard-form residue in [0, q) of a big integer modulo a u32 prime.
pub fn big_mod_prime_std(v: &BigInt, q: u32) -> u32 {
    let c = big_mod_prime(v, q);
    if c < 0 {
        (c + q as i64) as u32
    } else {
        c as u32
    }
}
