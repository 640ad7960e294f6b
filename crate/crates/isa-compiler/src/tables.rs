//! Scalar constant tables the lowering passes need: per-prime inverses,
//! punctured products for base extension, and plaintext-modulus residues of
//! chain primes.  Everything is computed by folding 64-bit modular products,
//! so building the tables is cheap even for the full-scale chain.

use crate::error::Result;
use crate::params::CompilerConfig;
use bgv_core::arith::{inv_mod_u64, mul_mod_u64};
use rns_ring::{ModulusChain, NttPrime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrimeSel {
    Q(u16),
    P(u16),
}

impl PrimeSel {
    /// Flat index used by the textual form: chain primes first, then the
    /// extension primes.
    pub fn flat(self, count_q: usize) -> usize {
        match self {
            PrimeSel::Q(i) => i as usize,
            PrimeSel::P(i) => count_q + i as usize,
        }
    }

    pub fn from_flat(idx: usize, count_q: usize) -> Self {
        if idx < count_q {
            PrimeSel::Q(idx as u16)
        } else {
            PrimeSel::P((idx - count_q) as u16)
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChainTables {
    pub chain: ModulusChain,
    pub t: u64,
    pub count_q: usize,
    pub count_p: usize,
}

impl ChainTables {
    pub fn build(config: &CompilerConfig) -> Result<Self> {
        let b = &config.bgv;
        let chain = ModulusChain::generate(b.n_log, b.prime_bits, b.count_q, b.count_p)?;
        Ok(ChainTables {
            chain,
            t: b.plain_modulus,
            count_q: b.count_q,
            count_p: b.count_p,
        })
    }

    pub fn prime(&self, sel: PrimeSel) -> &NttPrime {
        match sel {
            PrimeSel::Q(i) => &self.chain.q_primes[i as usize],
            PrimeSel::P(i) => &self.chain.p_primes[i as usize],
        }
    }

    pub fn modulus(&self, sel: PrimeSel) -> u64 {
        self.prime(sel).q as u64
    }

    /// Product of `sels` reduced mod `m`.
    pub fn product_mod(&self, sels: &[PrimeSel], m: u64) -> u64 {
        sels.iter()
            .fold(1u64, |acc, &s| mul_mod_u64(acc, self.modulus(s) % m, m))
    }

    /// Inverse of the product of `sels` mod the modulus of `target`.
    pub fn product_inv_mod(&self, sels: &[PrimeSel], target: PrimeSel) -> u64 {
        let m = self.modulus(target);
        inv_mod_u64(self.product_mod(sels, m), m).expect("unit")
    }

    /// `t^-1 mod p` for the extension prime `p`.
    pub fn t_inv_mod(&self, target: PrimeSel) -> u64 {
        let m = self.modulus(target);
        inv_mod_u64(self.t % m, m).expect("unit")
    }

    /// Residue of the plaintext modulus in `target`.
    pub fn t_mod(&self, target: PrimeSel) -> u64 {
        self.t % self.modulus(target)
    }

    /// Base-extension weights for target `m`: `w_i = prod_{j != i} s_j mod m`.
    pub fn punctured_mod(&self, sources: &[PrimeSel], target: PrimeSel) -> Vec<u64> {
        let m = self.modulus(target);
        sources
            .iter()
            .enumerate()
            .map(|(i, _)| {
                sources
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .fold(1u64, |acc, (_, &s)| mul_mod_u64(acc, self.modulus(s) % m, m))
            })
            .collect()
    }

    /// Digit scale factors: `(prod_{j != i} s_j)^-1 mod s_i` for each source.
    pub fn punctured_inv(&self, sources: &[PrimeSel]) -> Vec<u64> {
        sources
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let m = self.modulus(s);
                let prod = sources
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .fold(1u64, |acc, (_, &o)| mul_mod_u64(acc, self.modulus(o) % m, m));
                inv_mod_u64(prod, m).expect("unit")
            })
            .collect()
    }

    /// `[q_k^-1 mod t]` folded over every chain prime dropped when switching
    /// from `from` down to `to` active primes.  This is the factor the
    /// correction exponent picks up.
    pub fn kappa_drop_factor(&self, from: usize, to: usize) -> u64 {
        (to..from).fold(1u64, |acc, k| {
            let qk = self.chain.q_primes[k].q as u64 % self.t;
            mul_mod_u64(acc, inv_mod_u64(qk, self.t).expect("unit"), self.t)
        })
    }

    /// Selectors of the active chain primes at `level`.
    pub fn active(&self, level: usize) -> Vec<PrimeSel> {
        (0..level).map(|i| PrimeSel::Q(i as u16)).collect()
    }

    pub fn exts(&self) -> Vec<PrimeSel> {
        (0..self.count_p).map(|i| PrimeSel::P(i as u16)).collect()
    }

    /// Active plus extension primes, the working basis during key switching.
    pub fn work_basis(&self, level: usize) -> Vec<PrimeSel> {
        let mut v = self.active(level);
        v.extend(self.exts());
        v
    }

    /// Digit groups at `level` for the configured digit width.
    pub fn digit_groups(&self, level: usize, width: usize) -> Vec<(usize, usize)> {
        let mut groups = Vec::new();
        let mut lo = 0;
        while lo < level {
            let hi = (lo + width).min(level);
            groups.push((lo, hi));
            lo = hi;
        }
        groups
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use accel_model::FbeKernel;
    use rns_ring::mont::{mont_reduce, to_unsigned};

    fn tables() -> ChainTables {
        ChainTables::build(&CompilerConfig::desk()).unwrap()
    }

    #[test]
    fn punctured_constants_match_the_mac_kernel() {
        let tb = tables();
        let sources: Vec<PrimeSel> = (0..2).map(PrimeSel::Q).collect();
        let src_primes: Vec<_> = sources.iter().map(|&s| tb.prime(s).clone()).collect();
        let tgt_primes: Vec<_> = [PrimeSel::Q(2), PrimeSel::P(0)]
            .iter()
            .map(|&s| tb.prime(s).clone())
            .collect();
        let kernel = FbeKernel::new(&src_primes, &tgt_primes);
        for (i, &s) in sources.iter().enumerate() {
            let q = tb.prime(s);
            let got = tb.punctured_inv(&sources)[i];
            let kern = mont_reduce(kernel.inv_punctured_mont[i] as u64, q.q, q.low_fixed) as u64;
            assert_eq!(got, kern);
        }
        for (t, &tsel) in [PrimeSel::Q(2), PrimeSel::P(0)].iter().enumerate() {
            let m = tb.prime(tsel);
            let ws = tb.punctured_mod(&sources, tsel);
            for i in 0..sources.len() {
                let kern = mont_reduce(kernel.weights_mont[t][i] as u64, m.q, m.low_fixed) as u64;
                assert_eq!(ws[i], kern, "target {t} source {i}");
            }
        }
    }

    #[test]
    fn kappa_factor_inverts_dropped_primes() {
        let tb = tables();
        let f = tb.kappa_drop_factor(4, 2);
        let back = (2..4).fold(f, |acc, k| {
            mul_mod_u64(acc, tb.chain.q_primes[k].q as u64 % tb.t, tb.t)
        });
        assert_eq!(back, 1);
    }

    #[test]
    fn digit_groups_cover_the_level() {
        let tb = tables();
        assert_eq!(tb.digit_groups(4, 2), vec![(0, 2), (2, 4)]);
        assert_eq!(tb.digit_groups(3, 2), vec![(0, 2), (2, 3)]);
        assert_eq!(tb.digit_groups(2, 4), vec![(0, 2)]);
    }
}
