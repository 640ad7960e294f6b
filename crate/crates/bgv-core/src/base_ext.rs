//! Fast base extension and the approximate RNS reduction built on it.
//!
//! Fast base extension of x given on source primes a_1..a_k:
//!
//!   y_i  = [x * (A / a_i)^(-1)]_{a_i}   (centered)
//!   out_j = sum_i y_i * [A / a_i]_{p_j} mod p_j
//!
//! The output represents x + A*r with |r| <= k/2: correct mod every source
//! prime carried over, close mod the rest.  Tables hold the punctured
//! products both as centered residues and in Montgomery form; the sum is
//! accumulated sequentially in source order, which is also the order the
//! accelerator's MAC kernel uses.

use crate::crt::CrtBasis;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rns_ring::mont::{mont_reduce, to_centered, to_unsigned};
use rns_ring::poly::{Domain, ResiduePoly};
use rns_ring::{NttPrime, RnsPoly};

#[derive(Debug, Clone)]
pub struct FbeTable {
    pub source: Vec<NttPrime>,
    pub target: Vec<NttPrime>,
    /// (A / a_i)^(-1) mod a_i, Montgomery form per source prime.
    inv_punctured_mont: Vec<u32>,
    /// [A / a_i]_{p_j} in Montgomery form, indexed [target][source].
    punctured_mont: Vec<Vec<u32>>,
}

impl FbeTable {
    pub fn new(source: &[NttPrime], target: &[NttPrime]) -> Self {
        let basis = CrtBasis::new(source);
        let inv_punctured_mont = source
            .iter()
            .map(|p| {
                let m_mod = (&basis.product / p.q % p.q).to_u32().unwrap();
                p.to_mont(rns_ring::mont::inv_mod(m_mod, p.q))
            })
            .collect();
        let punctured_mont = target
            .iter()
            .map(|tp| {
                source
                    .iter()
                    .map(|sp| {
                        let m: BigInt = &basis.product / sp.q;
                        let r = (m % tp.q).to_u32().unwrap();
                        tp.to_mont(r)
                    })
                    .collect()
            })
            .collect();
        FbeTable {
            source: source.to_vec(),
            target: target.to_vec(),
            inv_punctured_mont,
            punctured_mont,
        }
    }

    /// Extend coefficient-domain residues over the source basis to every
    /// target prime.  `inputs` must align with `self.source`.
    pub fn extend(&self, inputs: &[&ResiduePoly]) -> Vec<ResiduePoly> {
        assert_eq!(inputs.len(), self.source.len());
        let n = inputs[0].n();
        for (inp, sp) in inputs.iter().zip(&self.source) {
            assert_eq!(inp.prime.q, sp.q);
            assert_eq!(inp.domain, Domain::Coefficient);
        }
        // y_i per coefficient, centered.
        let mut digits = vec![vec![0i64; n]; self.source.len()];
        for (i, (inp, sp)) in inputs.iter().zip(&self.source).enumerate() {
            let inv_m = self.inv_punctured_mont[i];
            for (j, &c) in inp.coeffs.iter().enumerate() {
                let y = mont_reduce(
                    to_unsigned(c, sp.q) as u64 * inv_m as u64,
                    sp.q,
                    sp.low_fixed,
                );
                digits[i][j] = to_centered(y, sp.q);
            }
        }
        self.target
            .iter()
            .enumerate()
            .map(|(tj, tp)| {
                let weights = &self.punctured_mont[tj];
                let q = tp.q;
                let coeffs = (0..n)
                    .map(|j| {
                        let mut acc = 0u64;
                        for (i, w) in weights.iter().enumerate() {
                            let y = digits[i][j].rem_euclid(q as i64) as u32;
                            let prod = mont_reduce(y as u64 * *w as u64, q, tp.low_fixed);
                            acc += prod as u64;
                            if acc >= q as u64 {
                                acc -= q as u64;
                            }
                        }
                        to_centered(acc as u32, q)
                    })
                    .collect();
                ResiduePoly::from_coeffs(*tp, Domain::Coefficient, coeffs)
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SmallMontTable {
    /// Base extension from the dropped basis D to the kept basis S.
    fbe: FbeTable,
    /// m^(-1) mod d for every dropped prime d (standard form).
    m_inv_mod_d: Vec<u32>,
    /// [m]_{s} centered, per kept prime.
    m_mod_s: Vec<i64>,
    /// (prod D)^(-1) mod s, Montgomery form, per kept prime.
    d_inv_mont: Vec<u32>,
}

impl SmallMontTable {
    /// Reduction that divides by the product of `dropped` while keeping the
    /// result correct modulo `m` (an arbitrary positive integer coprime to
    /// everything in sight) and small.
    pub fn new(dropped: &[NttPrime], kept: &[NttPrime], m: &BigInt) -> Self {
        let fbe = FbeTable::new(dropped, kept);
        let d_product: BigInt = dropped.iter().fold(BigInt::from(1u32), |a, p| a * p.q);
        let m_inv_mod_d = dropped
            .iter()
            .map(|p| {
                let mm = (m % p.q).to_u32().unwrap();
                rns_ring::mont::inv_mod(mm, p.q)
            })
            .collect();
        let m_mod_s = kept
            .iter()
            .map(|p| crate::crt::big_mod_prime(m, p.q))
            .collect();
        let d_inv_mont = kept
            .iter()
            .map(|p| {
                let dm = (&d_product % p.q).to_u32().unwrap();
                p.to_mont(rns_ring::mont::inv_mod(dm, p.q))
            })
            .collect();
        SmallMontTable {
            fbe,
            m_inv_mod_d,
            m_mod_s,
            d_inv_mont,
        }
    }

    /// Input x over dropped + kept (coefficient domain); output over kept:
    ///
    ///   u = [x * m^(-1)]_D,  u_hat = FBE(u -> S),  out = (x - m*u_hat) / D
    ///
    /// out = x * D^(-1) mod m, with |out| <= (1 + eps) * m/2 for
    /// eps = (k_D - 1 + 2*|x| / (D * m/2))-ish; the caller budgets for it.
    pub fn reduce(&self, x_dropped: &[&ResiduePoly], x_kept: &[&ResiduePoly]) -> Vec<ResiduePoly> {
        assert_eq!(x_dropped.len(), self.fbe.source.len());
        assert_eq!(x_kept.len(), self.fbe.target.len());
        let n = x_dropped[0].n();
        // u over D
        let u: Vec<ResiduePoly> = x_dropped
            .iter()
            .zip(&self.fbe.source)
            .zip(&self.m_inv_mod_d)
            .map(|((x, p), &minv)| {
                let minv_m = p.to_mont(minv);
                let coeffs = x
                    .coeffs
                    .iter()
                    .map(|&c| {
                        let v = mont_reduce(
                            to_unsigned(c, p.q) as u64 * minv_m as u64,
                            p.q,
                            p.low_fixed,
                        );
                        to_centered(v, p.q)
                    })
                    .collect();
                ResiduePoly::from_coeffs(*p, Domain::Coefficient, coeffs)
            })
            .collect();
        let u_hat = self.fbe.extend(&u.iter().collect::<Vec<_>>());
        x_kept
            .iter()
            .zip(&self.fbe.target)
            .zip(u_hat.iter().zip(self.m_mod_s.iter().zip(&self.d_inv_mont)))
            .map(|((x, p), (uh, (&m_s, &dinv_m)))| {
                let q = p.q;
                let coeffs = (0..n)
                    .map(|j| {
                        let diff = rns_ring::mont::centered_rem(
                            x.coeffs[j] as i128 - m_s as i128 * uh.coeffs[j] as i128,
                            q as u64,
                        );
                        let v = mont_reduce(
                            to_unsigned(diff, q) as u64 * dinv_m as u64,
                            q,
                            p.low_fixed,
                        );
                        to_centered(v, q)
                    })
                    .collect();
                ResiduePoly::from_coeffs(*p, Domain::Coefficient, coeffs)
            })
            .collect()
    }
}

/// Convenience wrapper: extend a coefficient-domain RNS polynomial given on
/// `table.source` onto source + target.
pub fn extend_poly(table: &FbeTable, poly: &RnsPoly) -> RnsPoly {
    let inputs: Vec<&ResiduePoly> = table
        .source
        .iter()
        .map(|p| poly.residue_for(p.q).expect("missing source residue"))
        .collect();
    let exts = table.extend(&inputs);
    let mut residues: Vec<ResiduePoly> = inputs.into_iter().cloned().collect();
    residues.extend(exts);
    RnsPoly { residues }
}
