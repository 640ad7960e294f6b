//! Recryption parameters and the pair of contexts it runs across.
//!
//! The input ciphertext is switched down to the two lowest chain primes
//! (the small modulus), raised onto the remaining primes (the working
//! chain), and the rounding circuit then runs entirely on the working
//! chain.  Both contexts share one secret key; the working context's
//! nominal plaintext modulus is p^e so that a single set of switching
//! keys serves every precision the circuit passes through.

use crate::error::BootstrapError;
use bgv_core::{BgvContext, BgvParams, Packing};
use num_bigint::BigInt;
use num_traits::One;
use rns_ring::{ModulusChain, NttPrime};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapParams {
    /// Plaintext prime.
    pub p: u64,
    /// Plaintext precision: messages live mod p^r.
    pub r: u32,
    /// Raised precision used during rounding.
    pub e: u32,
    /// Extra budget bits required on top of (e - r) log2 p before raising.
    pub margin_bits: f64,
}

impl BootstrapParams {
    pub fn desk() -> Self {
        BootstrapParams {
            p: 5,
            r: 1,
            e: 3,
            margin_bits: 8.0,
        }
    }

    /// Budget a ciphertext must still have at the small modulus.
    pub fn required_budget_bits(&self) -> f64 {
        (self.e - self.r) as f64 * (self.p as f64).log2() + self.margin_bits
    }
}

#[derive(Debug)]
pub struct BootstrapContext {
    /// Full-chain context the application computes in.
    pub base: BgvContext,
    /// Context over the chain minus the two small-modulus primes.
    pub work: BgvContext,
    pub params: BootstrapParams,
    pub packing: Packing,
    /// The two primes forming the small modulus, in chain order.
    pub small_primes: Vec<NttPrime>,
    pub small_product: BigInt,
    /// [small_product^-1] mod p^r, folded into the output correction factor.
    pub small_inv_mod_t: u64,
}

impl BootstrapContext {
    pub fn new(base_params: BgvParams, params: BootstrapParams) -> Result<Self, BootstrapError> {
        if params.e <= params.r {
            return Err(BootstrapError::PrecisionOrder {
                e: params.e,
                r: params.r,
            });
        }
        if base_params.plain_modulus != params.p.pow(params.r) {
            return Err(BootstrapError::PlainModulusShape {
                t: base_params.plain_modulus,
                p: params.p,
                r: params.r,
            });
        }
        let base = BgvContext::new(base_params.clone())?;
        if base.params.count_q < 6 {
            return Err(BootstrapError::ChainTooShort {
                needed: 6,
                have: base.params.count_q,
            });
        }
        // The rounding junk per coefficient is (1 + ||s||_1)/2 plus a few
        // units of base-extension slack; it has to round away inside one
        // digit of width p^(e-r).
        let l1 = base
            .params
            .secret_weight
            .unwrap_or(2 * base.params.n() / 3) as f64;
        let junk = (1.0 + l1) / 2.0 + 3.0;
        let half = params.p.pow(params.e - params.r) as f64 / 2.0;
        if junk >= half {
            return Err(BootstrapError::JunkOverflow { junk, half });
        }

        let small_primes = base.chain.q_primes[..2].to_vec();
        let work_chain = ModulusChain {
            q_primes: base.chain.q_primes[2..].to_vec(),
            p_primes: base.chain.p_primes.clone(),
            aux: base.chain.aux,
        };
        let mut work_params = base_params.clone();
        work_params.plain_modulus = params.p.pow(params.e);
        let work = BgvContext::with_chain(work_params, work_chain)?;

        let packing = Packing::new(base_params.n_log, params.p, params.e)?;

        let small_product: BigInt = small_primes
            .iter()
            .fold(BigInt::one(), |acc, p| acc * p.q);
        let t = params.p.pow(params.r);
        let small_mod_t = (&small_product % t)
            .try_into()
            .expect("residue fits u64");
        let small_inv_mod_t = bgv_core::arith::inv_mod_u64(small_mod_t, t)
            .expect("chain primes are coprime to p");

        Ok(BootstrapContext {
            base,
            work,
            params,
            packing,
            small_primes,
            small_product,
            small_inv_mod_t,
        })
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }
}
