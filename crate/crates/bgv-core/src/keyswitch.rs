//! Hybrid key switching with cumulative mixed-radix digits.
//!
//! The full chain q_1..q_L is partitioned once, in chain order, into digit
//! groups of `digit_width` primes.  Row j of a key encrypts
//! P * C_j * target where C_j is the product of all groups before j, so one
//! key serves every level prefix: at level L' only the first
//! ceil(L'/width) rows participate, and the last group simply intersects
//! the active primes.
//!
//! Applying the key to a polynomial x under `target`:
//!
//!   rem = x
//!   for each digit group j:
//!     d_hat = [rem] on the group's active primes
//!     d     = base-extend d_hat onto all other active primes and P
//!     acc  += d * row_j          (both components, evaluation domain)
//!     rem   = (rem - d) / D_j    on the primes after the group
//!
//! then the accumulator is scaled down by P exactly as a modulus switch.
//! The telescoping sum reproduces x plus a multiple of the active modulus,
//! which the P factor in the rows absorbs, so no correction factor enters
//! the plaintext.

use crate::base_ext::FbeTable;
use crate::crt::big_mod_prime;
use crate::error::BgvError;
use crate::keys::{KswKey, KswRow, SecretKey};
use crate::params::BgvContext;
use crate::sampling::Sampler;
use num_bigint::BigInt;
use num_traits::One;
use rns_ring::mont::{centered_rem, inv_mod, to_centered};
use rns_ring::poly::ResiduePoly;
use rns_ring::{Domain, NttPrime, RnsPoly};

/// Generate a key switching `target -> s`.  `target` is given over the
/// full q + extension basis in the evaluation domain.
pub fn gen_ksw_key(
    ctx: &BgvContext,
    sk: &SecretKey,
    target: &RnsPoly,
    sampler: &mut Sampler,
) -> Result<KswKey, BgvError> {
    let t = ctx.params.plain_modulus;
    let width = ctx.params.digit_width;
    let full: Vec<NttPrime> = ctx
        .chain
        .q_primes
        .iter()
        .chain(ctx.chain.p_primes.iter())
        .copied()
        .collect();
    let n = ctx.n();
    let s_eval = sk.to_eval(ctx, &full);
    let p_prod: BigInt = ctx
        .chain
        .p_primes
        .iter()
        .fold(BigInt::one(), |a, p| a * p.q);

    let digits = ctx.params.count_q.div_ceil(width);
    let mut rows = Vec::with_capacity(digits);
    let mut c_j = BigInt::one();
    for j in 0..digits {
        let a = RnsPoly {
            residues: full
                .iter()
                .map(|&p| {
                    ResiduePoly::from_coeffs(
                        p,
                        Domain::Evaluation,
                        sampler.uniform_poly(n, p.q),
                    )
                })
                .collect(),
        };
        let e = ctx
            .ring
            .to_eval(&RnsPoly::from_int_coeffs(&full, &sampler.gaussian_poly(n)));
        let mut b = a.clone();
        b.pointwise_mul_assign(&s_eval)?;
        b.negate();
        let mut te = e;
        te.scalar_mul_assign(t as i64);
        b.add_assign(&te)?;
        let weight = &p_prod * &c_j;
        let mut term = target.clone();
        let scalars: Vec<i64> = full.iter().map(|p| big_mod_prime(&weight, p.q)).collect();
        term.scalar_mul_rns_assign(&scalars);
        b.add_assign(&term)?;
        rows.push(KswRow { b, a });

        for p in ctx.chain.q_primes[j * width..((j + 1) * width).min(ctx.params.count_q)].iter() {
            c_j *= p.q;
        }
    }
    Ok(KswKey {
        rows,
        digit_width: width,
        a_seed: 0,
    })
}

/// Apply a key to `x` (evaluation domain over the active primes at
/// `level`), returning the (delta_c0, delta_c1) to add to a ciphertext.
pub fn apply_ksw(
    ctx: &BgvContext,
    key: &KswKey,
    x: &RnsPoly,
    level: usize,
) -> Result<(RnsPoly, RnsPoly), BgvError> {
    let active: Vec<NttPrime> = ctx.active_primes(level).to_vec();
    let exts: Vec<NttPrime> = ctx.chain.p_primes.clone();
    let width = key.digit_width;
    let digits = level.div_ceil(width);
    let t = ctx.params.plain_modulus;

    // Working basis in chain order: active then extension primes.
    let work: Vec<NttPrime> = active.iter().chain(exts.iter()).copied().collect();

    let x_coeff = ctx.ring.to_coeff(x);
    let mut rem: Vec<ResiduePoly> = x_coeff.residues.clone();

    let mut acc0 = RnsPoly::zero(&work, Domain::Evaluation);
    let mut acc1 = RnsPoly::zero(&work, Domain::Evaluation);

    for j in 0..digits {
        let lo = j * width;
        let hi = ((j + 1) * width).min(level);
        let group: Vec<NttPrime> = active[lo..hi].to_vec();
        let others: Vec<NttPrime> = active
            .iter()
            .enumerate()
            .filter(|(i, _)| *i < lo || *i >= hi)
            .map(|(_, p)| *p)
            .chain(exts.iter().copied())
            .collect();
        let fbe = FbeTable::new(&group, &others);
        let digit_inputs: Vec<&ResiduePoly> = (lo..hi).map(|i| &rem[i]).collect();
        let ext_out = fbe.extend(&digit_inputs);

        // Assemble d_j over the working basis in chain order.
        let mut d_res: Vec<ResiduePoly> = Vec::with_capacity(work.len());
        let mut ext_iter = ext_out.iter();
        for (i, p) in work.iter().enumerate() {
            if i >= lo && i < hi {
                d_res.push(rem[i].clone());
            } else {
                let e = ext_iter.next().expect("extension aligned");
                assert_eq!(e.prime.q, p.q);
                d_res.push(e.clone());
            }
        }
        let d_eval = ctx.ring.to_eval(&RnsPoly { residues: d_res.clone() });

        let row = &key.rows[j];
        let mut term0 = RnsPoly {
            residues: work
                .iter()
                .map(|p| row.b.residue_for(p.q).expect("row residue").clone())
                .collect(),
        };
        term0.pointwise_mul_assign(&d_eval)?;
        acc0.add_assign(&term0)?;
        let mut term1 = RnsPoly {
            residues: work
                .iter()
                .map(|p| row.a.residue_for(p.q).expect("row residue").clone())
                .collect(),
        };
        term1.pointwise_mul_assign(&d_eval)?;
        acc1.add_assign(&term1)?;

        // rem <- (rem - d) / D_j on the primes after this group.
        if hi < level {
            let d_prod: BigInt = group.iter().fold(BigInt::one(), |a, p| a * p.q);
            for i in hi..level {
                let p = active[i];
                let dj = &d_res[i];
                let dinv = inv_mod(crate::crt::big_mod_prime_std(&d_prod, p.q), p.q);
                let dinv_c = to_centered(dinv, p.q);
                for (c, &d) in rem[i].coeffs.iter_mut().zip(&dj.coeffs) {
                    let diff = centered_rem(*c as i128 - d as i128, p.q as u64);
                    *c = centered_rem(diff as i128 * dinv_c as i128, p.q as u64);
                }
            }
        }
    }

    // Exact scale-down by P, as in a modulus switch but with the rounding
    // correction base-extended rather than lifted.
    let acc0_c = ctx.ring.to_coeff(&acc0);
    let acc1_c = ctx.ring.to_coeff(&acc1);
    let p_scale = |acc: &RnsPoly| -> Result<RnsPoly, BgvError> {
        let mut w_res: Vec<ResiduePoly> = Vec::with_capacity(exts.len());
        for p in &exts {
            let r = acc.residue_for(p.q).expect("extension residue");
            let tinv = inv_mod((t % p.q as u64) as u32, p.q);
            let tinv_c = to_centered(tinv, p.q);
            let coeffs = r
                .coeffs
                .iter()
                .map(|&c| centered_rem(c as i128 * tinv_c as i128, p.q as u64))
                .collect();
            w_res.push(ResiduePoly::from_coeffs(*p, Domain::Coefficient, coeffs));
        }
        let fbe = FbeTable::new(&exts, &active);
        let w_ext = fbe.extend(&w_res.iter().collect::<Vec<_>>());
        let p_prod: BigInt = exts.iter().fold(BigInt::one(), |a, p| a * p.q);
        let residues = active
            .iter()
            .zip(w_ext.iter())
            .map(|(p, w)| {
                let r = acc.residue_for(p.q).expect("active residue");
                let pinv = inv_mod(crate::crt::big_mod_prime_std(&p_prod, p.q), p.q);
                let pinv_c = to_centered(pinv, p.q) as i128;
                let coeffs = r
                    .coeffs
                    .iter()
                    .zip(&w.coeffs)
                    .map(|(&c, &wv)| {
                        let num = centered_rem(c as i128 - t as i128 * wv as i128, p.q as u64);
                        centered_rem(num as i128 * pinv_c, p.q as u64)
                    })
                    .collect();
                ResiduePoly::from_coeffs(*p, Domain::Coefficient, coeffs)
            })
            .collect();
        Ok(ctx.ring.to_eval(&RnsPoly { residues }))
    };
    Ok((p_scale(&acc0_c)?, p_scale(&acc1_c)?))
}
