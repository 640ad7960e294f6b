//! Leveled BGV over an RNS prime chain with a multiplicative correction
//! factor, hybrid key switching with level-independent keys, slot packing
//! by binomial factorization, and the base-extension primitives shared
//! with the accelerator model.

pub mod arith;
pub mod base_ext;
pub mod ciphertext;
pub mod crt;
pub mod encrypt;
pub mod error;
pub mod keys;
pub mod keyswitch;
pub mod modswitch;
pub mod noise;
pub mod ops;
pub mod params;
pub mod sampling;
pub mod sizes;
pub mod slots;

pub use base_ext::{FbeTable, SmallMontTable};
pub use ciphertext::Ciphertext;
pub use crt::CrtBasis;
pub use encrypt::{decrypt, encrypt, encrypt_at_level, keygen, DecryptOutput};
pub use error::BgvError;
pub use keys::{EvalKeys, KswKey, PublicKey, SecretKey};
pub use keyswitch::{apply_ksw, gen_ksw_key};
pub use modswitch::{mod_switch, mod_switch_to_level};
pub use noise::{NoiseBound, NoiseModel};
pub use ops::{
    he_add, he_add_scalar, he_automorphism, he_exact_divide_by, he_mul, he_plain_mul,
    he_scalar_mul, he_sub,
};
pub use params::{BgvContext, BgvParams};
pub use sampling::Sampler;
pub use slots::Packing;

use rns_ring::RnsPoly;

/// Generate the evaluation keys needed for multiplication and a set of
/// automorphisms.
pub fn gen_eval_keys(
    ctx: &BgvContext,
    sk: &SecretKey,
    automorphisms: &[usize],
    sampler: &mut Sampler,
) -> Result<EvalKeys, BgvError> {
    let full: Vec<rns_ring::NttPrime> = ctx
        .chain
        .q_primes
        .iter()
        .chain(ctx.chain.p_primes.iter())
        .copied()
        .collect();
    let s_eval = sk.to_eval(ctx, &full);
    let mut s2 = s_eval.clone();
    s2.pointwise_mul_assign(&s_eval)?;
    let relin = gen_ksw_key(ctx, sk, &s2, sampler)?;
    let mut rotations = std::collections::BTreeMap::new();
    for &k in automorphisms {
        if rotations.contains_key(&k) {
            continue;
        }
        let s_k: RnsPoly = s_eval.automorphism(k)?;
        rotations.insert(k, gen_ksw_key(ctx, sk, &s_k, sampler)?);
    }
    Ok(EvalKeys { relin, rotations })
}
