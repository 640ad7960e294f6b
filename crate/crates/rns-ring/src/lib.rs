//! Residue-number-system polynomial arithmetic over chains of NTT-friendly
//! 32-bit primes: Montgomery reduction specialized to the chain's fixed
//! low-bit pattern, prime chain generation, negacyclic transforms in direct
//! and two-pass form, and Galois automorphisms in both domains.

pub mod error;
pub mod mont;
pub mod ntt;
pub mod poly;
pub mod prime;
pub mod twiddle;
pub mod two_pass;

pub use error::RingError;
pub use ntt::{intt_direct, ntt_direct, NttTable};
pub use poly::{bitrev, Domain, ResiduePoly, RnsPoly};
pub use prime::{generate_prime_chain, is_prime_u32, ModulusChain, NttPrime};
pub use twiddle::{power_generator, TwoPassTwiddles};
pub use two_pass::{intt_two_pass, ntt_two_pass};

use std::collections::HashMap;

/// Shared per-prime transform tables for a parameter set.
#[derive(Debug, Clone, Default)]
pub struct RingContext {
    tables: HashMap<u32, NttTable>,
}

impl RingContext {
    pub fn new(primes: &[NttPrime]) -> Self {
        let mut tables = HashMap::new();
        for &p in primes {
            tables.entry(p.q).or_insert_with(|| NttTable::new(p));
        }
        RingContext { tables }
    }

    pub fn add_prime(&mut self, prime: NttPrime) {
        self.tables.entry(prime.q).or_insert_with(|| NttTable::new(prime));
    }

    pub fn table(&self, q: u32) -> &NttTable {
        self.tables
            .get(&q)
            .unwrap_or_else(|| panic!("no transform table for modulus {q}"))
    }

    /// Transform every residue to the evaluation domain (no-op residues are
    /// rejected by the per-residue assertions).
    pub fn to_eval(&self, poly: &RnsPoly) -> RnsPoly {
        RnsPoly {
            residues: poly
                .residues
                .iter()
                .map(|r| ntt_direct(r, self.table(r.prime.q)))
                .collect(),
        }
    }

    pub fn to_coeff(&self, poly: &RnsPoly) -> RnsPoly {
        RnsPoly {
            residues: poly
                .residues
                .iter()
                .map(|r| intt_direct(r, self.table(r.prime.q)))
                .collect(),
        }
    }

    /// Negacyclic product via forward transform, pointwise multiply, inverse
    /// transform.  Inputs in the coefficient domain.
    pub fn multiply(&self, a: &RnsPoly, b: &RnsPoly) -> Result<RnsPoly, RingError> {
        let mut ea = self.to_eval(a);
        let eb = self.to_eval(b);
        ea.pointwise_mul_assign(&eb)?;
        Ok(self.to_coeff(&ea))
    }
}
