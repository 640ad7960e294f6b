//! The homomorphic modulus raise on a small ring: decrypt the raised
//! ciphertext under the working context and check the rounding contract
//! coefficient by coefficient, including against the plain-integer
//! reference.

use bgv_bootstrap::digits::extract_scalar;
use bgv_bootstrap::reference::round_decrypt_poly;
use bgv_bootstrap::{BootstrapContext, BootstrapError, BootstrapParams, RaiseTables};
use bgv_core::arith::{inv_mod_u64, mul_mod_u64};
use bgv_core::{decrypt, encrypt, keygen, mod_switch_to_level, BgvParams, CrtBasis, Sampler};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rns_ring::mont::centered_rem;

fn small_base() -> BgvParams {
    BgvParams {
        n_log: 4,
        plain_modulus: 97,
        count_q: 6,
        count_p: 2,
        prime_bits: 17,
        sigma: 3.2,
        secret_weight: None,
        digit_width: 2,
    }
}

fn bparams() -> BootstrapParams {
    BootstrapParams {
        p: 97,
        r: 1,
        e: 2,
        margin_bits: 8.0,
    }
}

#[test]
fn raise_output_rounds_back_to_the_message() {
    let bctx = BootstrapContext::new(small_base(), bparams()).unwrap();
    let tables = RaiseTables::new(&bctx);
    let n = bctx.n();
    let mut sampler = Sampler::new(616, 3.2);
    let (sk, pk) = keygen(&bctx.base, &mut sampler).unwrap();
    let small_q: u64 = bctx.small_primes.iter().map(|p| p.q as u64).product();
    let q_mod_t = small_q % 97;
    let mut rng = ChaCha8Rng::seed_from_u64(99);

    for trial in 0..8 {
        let msg: Vec<i64> = (0..n).map(|_| rng.gen_range(-48i64..=48)).collect();
        let ct = encrypt(&bctx.base, &pk, &msg, &mut sampler).unwrap();
        let low = mod_switch_to_level(&bctx.base, &ct, 2).unwrap();
        let kappa_low = low.kappa;

        let raised = modulus_raise_checked(&bctx, &tables, &low);
        let dec = decrypt(&bctx.work, &sk, &raised).unwrap();

        let kappa_inv = inv_mod_u64(kappa_low, 97).unwrap();
        for (i, &w) in dec.message.iter().enumerate() {
            let alpha = extract_scalar(w, 97, 2, 1);
            // junk stays far below half a digit
            let junk = centered_rem(w as i128 - 97 * alpha as i128, 97 * 97);
            assert!(junk.abs() <= 15, "trial {trial}, coeff {i}: junk {junk}");
            // q * alpha = kappa * m mod t, so undo kappa to get the message
            let raw = mul_mod_u64(
                q_mod_t,
                alpha.rem_euclid(97) as u64,
                97,
            );
            let m = centered_rem(mul_mod_u64(raw, kappa_inv, 97) as i128, 97);
            assert_eq!(m, msg[i], "trial {trial}, coeff {i}");
        }
    }
}

fn modulus_raise_checked(
    bctx: &BootstrapContext,
    tables: &RaiseTables,
    low: &bgv_core::Ciphertext,
) -> bgv_core::Ciphertext {
    let raised = bgv_bootstrap::modulus_raise(bctx, tables, low).unwrap();
    assert_eq!(raised.level, bctx.work.top_level());
    assert_eq!(raised.kappa, 1);
    assert_eq!(raised.plain_modulus, 97 * 97);
    raised
}

#[test]
fn raise_agrees_with_the_integer_reference() {
    let bctx = BootstrapContext::new(small_base(), bparams()).unwrap();
    let tables = RaiseTables::new(&bctx);
    let n = bctx.n();
    let mut sampler = Sampler::new(617, 3.2);
    let (sk, pk) = keygen(&bctx.base, &mut sampler).unwrap();
    let small_q: u64 = bctx.small_primes.iter().map(|p| p.q as u64).product();
    let crt = CrtBasis::new(&bctx.small_primes);
    let mut rng = ChaCha8Rng::seed_from_u64(100);

    let msg: Vec<i64> = (0..n).map(|_| rng.gen_range(-48i64..=48)).collect();
    let ct = encrypt(&bctx.base, &pk, &msg, &mut sampler).unwrap();
    let low = mod_switch_to_level(&bctx.base, &ct, 2).unwrap();

    // centered integer parts mod the small modulus
    let lift_part = |part: &rns_ring::RnsPoly| -> Vec<i64> {
        let coeff = bctx.base.ring.to_coeff(part);
        (0..n)
            .map(|j| {
                let residues: Vec<i64> = coeff.residues.iter().map(|r| r.coeffs[j]).collect();
                use num_traits::ToPrimitive;
                crt.lift_symmetric(&residues).to_i64().unwrap()
            })
            .collect()
    };
    let c0 = lift_part(&low.parts[0]);
    let c1 = lift_part(&low.parts[1]);
    let reference = round_decrypt_poly(&c0, &c1, &sk.coeffs, small_q, 97, 2, 1);

    let raised = bgv_bootstrap::modulus_raise(&bctx, &tables, &low).unwrap();
    let dec = decrypt(&bctx.work, &sk, &raised).unwrap();
    let via_raise: Vec<i64> = dec
        .message
        .iter()
        .map(|&w| {
            let alpha = extract_scalar(w, 97, 2, 1);
            centered_rem(small_q as i128 * alpha as i128, 97)
        })
        .collect();
    assert_eq!(via_raise, reference);
}

#[test]
fn parameter_validation_rejects_bad_shapes() {
    assert!(matches!(
        BootstrapContext::new(
            small_base(),
            BootstrapParams {
                p: 97,
                r: 1,
                e: 1,
                margin_bits: 8.0
            }
        ),
        Err(BootstrapError::PrecisionOrder { .. })
    ));

    let mut wrong_t = small_base();
    wrong_t.plain_modulus = 101;
    assert!(matches!(
        BootstrapContext::new(wrong_t, bparams()),
        Err(BootstrapError::PlainModulusShape { .. })
    ));

    let mut short = small_base();
    short.count_q = 4;
    assert!(matches!(
        BootstrapContext::new(short, bparams()),
        Err(BootstrapError::ChainTooShort { .. })
    ));

    // a dense secret at large N cannot fit its junk inside one digit of
    // width 5: (1 + 2N/3)/2 is far past 2.5
    let mut dense = small_base();
    dense.plain_modulus = 5;
    assert!(matches!(
        BootstrapContext::new(
            dense,
            BootstrapParams {
                p: 5,
                r: 1,
                e: 2,
                margin_bits: 8.0
            }
        ),
        Err(BootstrapError::JunkOverflow { .. })
    ));
}
