//! Linear maps between slot contents and polynomial coefficients, built
//! from masked automorphism sums.
//!
//! Writing rho_i for the root attached to slot i and perm_k for the slot
//! permutation of X -> X^k, any slot-wise linear map with matrix A can be
//! evaluated as sum_j mask_j * phi_{g_j}(x) where the g_j run over the
//! odd coset representatives below 2*ell and mask_j has slot value
//! A[i][perm_{g_j}(i)].  Slots-to-coeffs uses the Vandermonde matrix
//! directly; coeffs-to-slots first projects onto the slot subring with a
//! trace (log2(d) doubled automorphisms), then applies the inverse
//! Vandermonde scaled by 1/d.

use crate::circuit::RoundingCircuit;
use crate::error::BootstrapError;
use bgv_core::{he_add, he_automorphism, he_plain_mul, BgvContext, Ciphertext, EvalKeys};

fn masked_sum(
    ctx: &BgvContext,
    ct: &Ciphertext,
    autos: &[usize],
    masks: &[Vec<i64>],
    keys: &EvalKeys,
) -> Result<Ciphertext, BootstrapError> {
    assert_eq!(autos.len(), masks.len());
    let mut acc: Option<Ciphertext> = None;
    for (&k, mask) in autos.iter().zip(masks) {
        let rotated = if k == 1 {
            ct.clone()
        } else {
            let key = keys
                .rotation(k)
                .expect("rotation key generated from the circuit's list");
            he_automorphism(ctx, ct, k, key)?
        };
        let term = he_plain_mul(ctx, &rotated, mask)?;
        acc = Some(match acc {
            None => term,
            Some(a) => he_add(ctx, &a, &term)?,
        });
    }
    Ok(acc.expect("at least one slot"))
}

/// Move slot values into coefficients: on a thin input with slot values
/// v_i, the output plaintext is sum_i v_i X^(i*d) exactly.
pub fn slots_to_coeffs(
    ctx: &BgvContext,
    circuit: &RoundingCircuit,
    keys: &EvalKeys,
    ct: &Ciphertext,
) -> Result<Ciphertext, BootstrapError> {
    masked_sum(ctx, ct, &circuit.s2c_autos, &circuit.s2c_masks, keys)
}

/// Sum of phi_{p^(2^s)} orbits: fixes slot positions and maps every slot
/// content to d times its constant part.
fn trace(
    ctx: &BgvContext,
    keys: &EvalKeys,
    ct: &Ciphertext,
    autos: &[usize],
) -> Result<Ciphertext, BootstrapError> {
    let mut x = ct.clone();
    for &k in autos {
        let key = keys
            .rotation(k)
            .expect("rotation key generated from the circuit's list");
        let rotated = he_automorphism(ctx, &x, k, key)?;
        x = he_add(ctx, &x, &rotated)?;
    }
    Ok(x)
}

/// Move coefficients into slot values: the output is thin with slot i
/// equal to coefficient i*d of the input plaintext.
pub fn coeffs_to_slots(
    ctx: &BgvContext,
    circuit: &RoundingCircuit,
    keys: &EvalKeys,
    ct: &Ciphertext,
) -> Result<Ciphertext, BootstrapError> {
    let traced = trace(ctx, keys, ct, &circuit.trace_autos)?;
    masked_sum(ctx, &traced, &circuit.c2s_autos, &circuit.c2s_masks, keys)
}
