//! Key material.  The secret is a small integer polynomial; every derived
//! key stores evaluation-domain RNS polynomials over the bases it is used
//! with.

use crate::params::BgvContext;
use rns_ring::{Domain, NttPrime, RnsPoly};

#[derive(Debug, Clone)]
pub struct SecretKey {
    /// Ternary coefficients.
    pub coeffs: Vec<i64>,
}

impl SecretKey {
    /// The secret lifted into an RNS basis, evaluation domain.
    pub fn to_eval(&self, ctx: &BgvContext, primes: &[NttPrime]) -> RnsPoly {
        ctx.ring.to_eval(&RnsPoly::from_int_coeffs(primes, &self.coeffs))
    }

    pub fn hamming_weight(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    /// l1 norm, the quantity noise bounds depend on.
    pub fn l1(&self) -> i64 {
        self.coeffs.iter().map(|&c| c.abs()).sum()
    }
}

/// Encryption key (b, a) over the full chain with b + a*s = t*e.
#[derive(Debug, Clone)]
pub struct PublicKey {
    pub b: RnsPoly,
    pub a: RnsPoly,
}

/// One key-switching key: rows of (b_j, a_j) over the full q and extension
/// bases, where row j satisfies
///
///   b_j + a_j * s = t * e_j + P * C_j * target,   C_j = prod of digit
///   groups before j.
///
/// Rows cover the whole chain, so the key serves any level prefix.
#[derive(Debug, Clone)]
pub struct KswKey {
    pub rows: Vec<KswRow>,
    /// Primes per digit group.
    pub digit_width: usize,
    /// Seed that expanded every a_j; kept so the key can be shipped in
    /// seed-compressed form.
    pub a_seed: u64,
}

#[derive(Debug, Clone)]
pub struct KswRow {
    pub b: RnsPoly,
    pub a: RnsPoly,
}

impl KswKey {
    /// Number of digit groups needed to cover `level` active primes.
    pub fn digits_for_level(&self, level: usize) -> usize {
        level.div_ceil(self.digit_width)
    }
}

/// The rotation/relinearization key bundle used by higher layers.
#[derive(Debug, Clone)]
pub struct EvalKeys {
    /// Key switching s^2 -> s.
    pub relin: KswKey,
    /// Key switching phi_k(s) -> s for each supported automorphism k.
    pub rotations: std::collections::BTreeMap<usize, KswKey>,
}

impl EvalKeys {
    pub fn rotation(&self, k: usize) -> Option<&KswKey> {
        self.rotations.get(&k)
    }
}

pub fn zero_rns(primes: &[NttPrime]) -> RnsPoly {
    RnsPoly::zero(primes, Domain::Evaluation)
}
