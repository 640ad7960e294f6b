//! Modulus switching: drop the last active prime while dividing message
//! and noise by it.
//!
//! For each part c, with q_k the dropped prime:
//!
//!   w  = [c * t^(-1)]_{q_k}   (centered, coefficient domain)
//!   c' = (c - t*w) * q_k^(-1) on every remaining prime
//!
//! c - t*w = 0 mod q_k, so the quotient is exact; the message picks up a
//! factor q_k^(-1) mod t which is folded into kappa.

use crate::arith::{inv_mod_u64, mul_mod_u64};
use crate::ciphertext::Ciphertext;
use crate::error::BgvError;
use crate::params::BgvContext;
use rns_ring::mont::inv_mod;
use rns_ring::poly::ResiduePoly;
use rns_ring::{Domain, RnsPoly};

pub fn mod_switch(ctx: &BgvContext, ct: &Ciphertext) -> Result<Ciphertext, BgvError> {
    if ct.level <= 1 {
        return Err(BgvError::ChainBottom);
    }
    let t = ct.plain_modulus;
    let dropped = ctx.chain.q_primes[ct.level - 1];
    let remaining = &ctx.chain.q_primes[..ct.level - 1];
    let t_inv_qk = inv_mod((t % dropped.q as u64) as u32, dropped.q);

    let mut new_parts = Vec::with_capacity(ct.parts.len());
    for part in &ct.parts {
        // w on the dropped prime, coefficient domain.
        let r_eval = part.residue_for(dropped.q).expect("dropped residue present");
        let mut r_coeff = rns_ring::intt_direct(r_eval, ctx.ring.table(dropped.q));
        for c in r_coeff.coeffs.iter_mut() {
            *c = rns_ring::mont::to_centered(
                rns_ring::mont::mul_mod_u32(
                    rns_ring::mont::to_unsigned(*c, dropped.q),
                    t_inv_qk,
                    dropped.q,
                ),
                dropped.q,
            );
        }
        // Broadcast t*w onto every remaining prime and finish in the
        // evaluation domain.
        let residues = remaining
            .iter()
            .map(|&p| {
                let coeffs = r_coeff
                    .coeffs
                    .iter()
                    .map(|&w| rns_ring::mont::centered_rem(w as i128 * t as i128, p.q as u64))
                    .collect();
                ResiduePoly::from_coeffs(p, Domain::Coefficient, coeffs)
            })
            .collect();
        let tw_eval = ctx.ring.to_eval(&RnsPoly { residues });

        let mut out = RnsPoly {
            residues: remaining
                .iter()
                .map(|p| part.residue_for(p.q).expect("active residue").clone())
                .collect(),
        };
        out.sub_assign(&tw_eval)?;
        let qk_inv: Vec<i64> = remaining
            .iter()
            .map(|p| inv_mod(dropped.q % p.q, p.q) as i64)
            .collect();
        let qk_inv_centered: Vec<i64> = remaining
            .iter()
            .zip(&qk_inv)
            .map(|(p, &v)| rns_ring::mont::to_centered(v as u32, p.q))
            .collect();
        out.scalar_mul_rns_assign(&qk_inv_centered);
        new_parts.push(out);
    }

    let kappa = mul_mod_u64(
        ct.kappa,
        inv_mod_u64(dropped.q as u64 % t, t).ok_or(BgvError::NotAUnit {
            value: dropped.q as u64 % t,
            modulus: t,
        })?,
        t,
    );
    Ok(Ciphertext {
        parts: new_parts,
        level: ct.level - 1,
        kappa,
        plain_modulus: t,
    })
}

pub fn mod_switch_to_level(
    ctx: &BgvContext,
    ct: &Ciphertext,
    level: usize,
) -> Result<Ciphertext, BgvError> {
    if level == 0 || level > ct.level {
        return Err(BgvError::BadLevel {
            level,
            max: ct.level,
        });
    }
    let mut cur = ct.clone();
    while cur.level > level {
        cur = mod_switch(ctx, &cur)?;
    }
    Ok(cur)
}
