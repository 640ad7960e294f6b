//! Raising a ciphertext from the small modulus onto the working chain.
//!
//! The input lives mod the two lowest chain primes (product q) with
//! plaintext modulus p^r.  Each part is multiplied by p^(e-r) times the
//! auxiliary prime b and reduced mod q part by part, extended onto the
//! working chain plus b, and then two approximate reductions divide out
//! b and q while keeping the result correct mod p^e:
//!
//!   c_i' = [b * p^(e-r) * c_i]_q
//!   Y_i  = SmallMont drop b, keep mod q      (exact, single-prime digits)
//!   Z_i  = SmallMont drop q, keep mod p^e    (slack is a multiple of p^e)
//!
//! The output decrypts over the working chain to
//!
//!   Z_0 + Z_1 s  =  p^(e-r) * [q^(-1) kappa m]_{p^r} + M   (mod p^e)
//!
//! with |M| <= (1 + ||s||_1)/2 + p^(e-r) * noise/q + O(1/b), which the
//! digit extraction rounds away.  The q^(-1) factor is deferred to the
//! output correction factor rather than corrected homomorphically.

use crate::error::BootstrapError;
use crate::params::BootstrapContext;
use bgv_core::{Ciphertext, FbeTable, SmallMontTable};
use num_bigint::BigInt;
use rns_ring::mont::centered_rem;
use rns_ring::{NttPrime, RnsPoly};

/// Precomputed tables for the raise; reusable across ciphertexts.
pub struct RaiseTables {
    small: Vec<NttPrime>,
    scalars: Vec<i64>,
    fbe: FbeTable,
    drop_aux: SmallMontTable,
    drop_small: SmallMontTable,
}

impl RaiseTables {
    pub fn new(bctx: &BootstrapContext) -> Self {
        let small = bctx.small_primes.clone();
        let work: Vec<NttPrime> = bctx.work.chain.q_primes.clone();
        let aux = bctx.base.chain.aux;
        let lift = bctx.params.p.pow(bctx.params.e - bctx.params.r);

        let scalars: Vec<i64> = small
            .iter()
            .map(|pr| {
                let q = pr.q as u64;
                let s = (lift as u128 * (aux.q as u64 % q) as u128 % q as u128) as i128;
                centered_rem(s, q)
            })
            .collect();

        let mut ext_target = work.clone();
        ext_target.push(aux);
        let fbe = FbeTable::new(&small, &ext_target);

        let mut kept1 = small.clone();
        kept1.extend_from_slice(&work);
        let drop_aux = SmallMontTable::new(&[aux], &kept1, &bctx.small_product);

        let pe = BigInt::from(bctx.params.p.pow(bctx.params.e));
        let drop_small = SmallMontTable::new(&small, &work, &pe);

        RaiseTables {
            small,
            scalars,
            fbe,
            drop_aux,
            drop_small,
        }
    }
}

/// Raise a two-part ciphertext at the small modulus to the top of the
/// working chain.  The result has plaintext modulus p^e and correction
/// factor 1; the caller folds the input's kappa and the deferred q^(-1)
/// into the final output.
pub fn modulus_raise(
    bctx: &BootstrapContext,
    tables: &RaiseTables,
    ct: &Ciphertext,
) -> Result<Ciphertext, BootstrapError> {
    assert_eq!(ct.level, tables.small.len());
    assert_eq!(ct.parts.len(), 2);
    assert_eq!(ct.plain_modulus, bctx.params.p.pow(bctx.params.r));
    let work_len = bctx.work.chain.q_primes.len();

    let mut parts = Vec::with_capacity(2);
    for part in &ct.parts {
        let mut coeff = bctx.base.ring.to_coeff(part);
        coeff.scalar_mul_rns_assign(&tables.scalars);

        let ext = tables.fbe.extend(&coeff.residues.iter().collect::<Vec<_>>());
        let x_dropped = [&ext[work_len]];
        let mut x_kept: Vec<&_> = coeff.residues.iter().collect();
        x_kept.extend(ext[..work_len].iter());
        let y = tables.drop_aux.reduce(&x_dropped, &x_kept);

        let y_dropped: Vec<&_> = y[..tables.small.len()].iter().collect();
        let y_kept: Vec<&_> = y[tables.small.len()..].iter().collect();
        let z = tables.drop_small.reduce(&y_dropped, &y_kept);

        parts.push(bctx.work.ring.to_eval(&RnsPoly { residues: z }));
    }

    Ok(Ciphertext {
        parts,
        level: bctx.work.top_level(),
        kappa: 1,
        plain_modulus: bctx.params.p.pow(bctx.params.e),
    })
}
