//! The recryption pipeline: switch to the small modulus, move slots into
//! coefficients, raise onto the working chain, move coefficients back
//! into slots, and strip the junk digits.
//!
//! Slot transforms before the raise run under the base context (plaintext
//! modulus p^r); everything after runs under the working context, whose
//! keys are generated at plaintext modulus p^e and therefore serve every
//! precision the digit extraction passes through.  The output ciphertext
//! lives on the working chain with plaintext modulus p^r; later
//! operations keep using the working context and keys.

use crate::circuit::RoundingCircuit;
use crate::digits::extract_homomorphic;
use crate::error::BootstrapError;
use crate::params::BootstrapContext;
use crate::raise::{modulus_raise, RaiseTables};
use crate::transforms::{coeffs_to_slots, slots_to_coeffs};
use bgv_core::arith::mul_mod_u64;
use bgv_core::{gen_eval_keys, mod_switch_to_level, Ciphertext, EvalKeys, Sampler, SecretKey};

pub struct BootstrapKeys {
    pub base: EvalKeys,
    pub work: EvalKeys,
}

/// Keys for both contexts from one secret key.  The base set carries the
/// slots-to-coeffs automorphisms, the work set the trace and
/// coeffs-to-slots automorphisms plus relinearization.
pub fn gen_bootstrap_keys(
    bctx: &BootstrapContext,
    circuit: &RoundingCircuit,
    sk: &SecretKey,
    sampler: &mut Sampler,
) -> Result<BootstrapKeys, BootstrapError> {
    let base = gen_eval_keys(&bctx.base, sk, &circuit.base_automorphisms(), sampler)?;
    let work = gen_eval_keys(&bctx.work, sk, &circuit.work_automorphisms(), sampler)?;
    Ok(BootstrapKeys { base, work })
}

/// Recrypt a two-part ciphertext carrying thin slots.  Decryption of the
/// output equals decryption of the input; the output sits near the top of
/// the working chain with fresh noise budget.
///
/// The input must still hold enough budget at the small modulus for the
/// junk digits to stay under p^(e-r)/2; `BootstrapParams::
/// required_budget_bits` states the floor and the parameter validation
/// bounds the secret-key half of the junk.
pub fn bootstrap(
    bctx: &BootstrapContext,
    circuit: &RoundingCircuit,
    tables: &RaiseTables,
    keys: &BootstrapKeys,
    ct: &Ciphertext,
) -> Result<Ciphertext, BootstrapError> {
    let t = bctx.params.p.pow(bctx.params.r);
    let low = mod_switch_to_level(&bctx.base, ct, bctx.small_primes.len())?;
    let packed = slots_to_coeffs(&bctx.base, circuit, &keys.base, &low)?;
    let kappa_pre = packed.kappa;
    let raised = modulus_raise(bctx, tables, &packed)?;
    let slotted = coeffs_to_slots(&bctx.work, circuit, &keys.work, &raised)?;
    let mut out = extract_homomorphic(
        &bctx.work,
        &slotted,
        bctx.params.p,
        bctx.params.e,
        bctx.params.r,
        &keys.work.relin,
    )?;
    out.kappa = mul_mod_u64(
        out.kappa,
        mul_mod_u64(kappa_pre % t, bctx.small_inv_mod_t, t),
        t,
    );
    Ok(out)
}
