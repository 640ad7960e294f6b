//! Parameter sets and the derived context (prime chain, transform tables,
//! CRT bases) shared by every operation.

use crate::crt::CrtBasis;
use crate::error::BgvError;
use serde::{Deserialize, Serialize};
use rns_ring::{ModulusChain, NttPrime, RingContext};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BgvParams {
    /// log2 of the ring degree.
    pub n_log: u32,
    /// Plaintext modulus, odd and coprime to every chain prime.
    pub plain_modulus: u64,
    /// Number of primes in the switchable chain.
    pub count_q: usize,
    /// Number of extension primes backing key switching.
    pub count_p: usize,
    /// Bit size of every generated prime.
    pub prime_bits: u32,
    /// Gaussian parameter of the error distribution.
    pub sigma: f64,
    /// Fixed hamming weight for the ternary secret; None means uniform
    /// ternary.  Lives in the base parameters so key generation is
    /// byte-identical whether or not bootstrapping is ever configured.
    pub secret_weight: Option<usize>,
    /// Key-switch digit width: primes per digit group.
    pub digit_width: usize,
}

impl BgvParams {
    /// Tiny ring for hardware co-simulation: fully split slots at t = 97.
    pub fn desk_cosim() -> Self {
        BgvParams {
            n_log: 4,
            plain_modulus: 97,
            count_q: 4,
            count_p: 2,
            prime_bits: 17,
            sigma: 3.2,
            secret_weight: None,
            digit_width: 2,
        }
    }

    /// Mid-size ring able to run the full recryption pipeline on a desktop.
    pub fn desk_bootstrap() -> Self {
        BgvParams {
            n_log: 12,
            plain_modulus: 5,
            count_q: 26,
            count_p: 14,
            prime_bits: 31,
            sigma: 3.2,
            secret_weight: Some(16),
            digit_width: 13,
        }
    }

    /// Full-scale profile matching the accelerator's headline geometry.
    pub fn full_scale() -> Self {
        BgvParams {
            n_log: 16,
            plain_modulus: 127,
            count_q: 42,
            count_p: 14,
            prime_bits: 32,
            sigma: 3.2,
            secret_weight: Some(128),
            digit_width: 12,
        }
    }

    pub fn n(&self) -> usize {
        1 << self.n_log
    }
}

#[derive(Debug, Clone)]
pub struct BgvContext {
    pub params: BgvParams,
    pub chain: ModulusChain,
    pub ring: RingContext,
    /// CRT basis over the first `level` chain primes, indexed by level - 1.
    q_bases: Vec<CrtBasis>,
    /// CRT basis over the extension primes.
    pub p_basis: CrtBasis,
}

impl BgvContext {
    pub fn new(params: BgvParams) -> Result<Self, BgvError> {
        let chain = ModulusChain::generate(
            params.n_log,
            params.prime_bits,
            params.count_q,
            params.count_p,
        )?;
        Self::with_chain(params, chain)
    }

    /// Build a context over an explicit chain, for callers that carve a
    /// working chain out of a larger one (recryption drops the bottom
    /// primes and continues on the rest).
    pub fn with_chain(mut params: BgvParams, chain: ModulusChain) -> Result<Self, BgvError> {
        params.count_q = chain.q_primes.len();
        params.count_p = chain.p_primes.len();
        for p in chain.all_primes() {
            if gcd_check(params.plain_modulus, p.q) != 1 {
                return Err(BgvError::PlainModulusNotCoprime {
                    t: params.plain_modulus,
                    q: p.q,
                });
            }
        }
        let all: Vec<NttPrime> = chain.all_primes().copied().collect();
        let ring = RingContext::new(&all);
        let q_bases = (1..=params.count_q)
            .map(|lvl| CrtBasis::new(&chain.q_primes[..lvl]))
            .collect();
        let p_basis = CrtBasis::new(&chain.p_primes);
        Ok(BgvContext {
            params,
            chain,
            ring,
            q_bases,
            p_basis,
        })
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn top_level(&self) -> usize {
        self.params.count_q
    }

    /// The active chain primes at a level (level = number of active primes).
    pub fn active_primes(&self, level: usize) -> &[NttPrime] {
        &self.chain.q_primes[..level]
    }

    pub fn q_basis(&self, level: usize) -> &CrtBasis {
        &self.q_bases[level - 1]
    }

    /// log2 of the active modulus product.
    pub fn log2_q(&self, level: usize) -> f64 {
        self.active_primes(level)
            .iter()
            .map(|p| (p.q as f64).log2())
            .sum()
    }
}

fn gcd_check(a: u64, b: u32) -> u64 {
    let mut a = a;
    let mut b = b as u64;
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
