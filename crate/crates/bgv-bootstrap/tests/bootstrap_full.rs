//! End-to-end recryption: decryption equality before and after, and a
//! real budget gain.  One small ring keeps the loop tight; the mid-size
//! profile runs the same pipeline at realistic dimensions.

use bgv_bootstrap::{
    bootstrap, gen_bootstrap_keys, BootstrapContext, BootstrapParams, RaiseTables, RoundingCircuit,
};
use bgv_core::{decrypt, encrypt, keygen, mod_switch_to_level, BgvParams, Sampler};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::atomic::AtomicBool;

fn run_pipeline(base: BgvParams, bp: BootstrapParams, seed: u64) {
    let bctx = BootstrapContext::new(base, bp).unwrap();
    let cancel = AtomicBool::new(false);
    let circuit = RoundingCircuit::build(&bctx.packing, &bctx.params, &cancel).unwrap();
    let tables = RaiseTables::new(&bctx);

    let mut sampler = Sampler::new(seed, bctx.base.params.sigma);
    let (sk, pk) = keygen(&bctx.base, &mut sampler).unwrap();
    let keys = gen_bootstrap_keys(&bctx, &circuit, &sk, &mut sampler).unwrap();

    let t = bp.p.pow(bp.r) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51);
    let vals: Vec<i64> = (0..bctx.packing.ell)
        .map(|_| rng.gen_range(-(t / 2)..=t / 2))
        .collect();
    let coeffs = bctx.packing.thin_encode(&vals, bp.r).unwrap();
    let ct = encrypt(&bctx.base, &pk, &coeffs, &mut sampler).unwrap();

    let low = mod_switch_to_level(&bctx.base, &ct, bctx.small_primes.len()).unwrap();
    let dec_low = decrypt(&bctx.base, &sk, &low).unwrap();
    assert_eq!(bctx.packing.thin_decode(&dec_low.message, bp.r), vals);
    assert!(dec_low.budget_bits >= bp.required_budget_bits());

    let out = bootstrap(&bctx, &circuit, &tables, &keys, &ct).unwrap();
    assert_eq!(out.plain_modulus, bp.p.pow(bp.r));

    let dec_out = decrypt(&bctx.work, &sk, &out).unwrap();
    assert_eq!(
        bctx.packing.thin_decode(&dec_out.message, bp.r),
        vals,
        "recryption changed the plaintext"
    );
    assert!(
        dec_out.budget_bits > dec_low.budget_bits + 10.0,
        "no budget gained: {:.1} -> {:.1}",
        dec_low.budget_bits,
        dec_out.budget_bits
    );
}

#[test]
fn small_ring_bootstrap_roundtrip() {
    let base = BgvParams {
        n_log: 4,
        plain_modulus: 5,
        count_q: 20,
        count_p: 10,
        prime_bits: 17,
        sigma: 3.2,
        secret_weight: Some(10),
        digit_width: 5,
    };
    let bp = BootstrapParams {
        p: 5,
        r: 1,
        e: 3,
        margin_bits: 8.0,
    };
    run_pipeline(base, bp, 2024);
}

#[test]
fn desk_profile_bootstrap_roundtrip() {
    let bp = BootstrapParams::desk();
    run_pipeline(BgvParams::desk_bootstrap(), bp, 7001);
}

#[test]
fn bootstrap_handles_survivor_of_prior_computation() {
    // recrypt a ciphertext that already went through a few squarings
    let base = BgvParams {
        n_log: 4,
        plain_modulus: 5,
        count_q: 20,
        count_p: 10,
        prime_bits: 17,
        sigma: 3.2,
        secret_weight: Some(10),
        digit_width: 5,
    };
    let bp = BootstrapParams {
        p: 5,
        r: 1,
        e: 3,
        margin_bits: 8.0,
    };
    let bctx = BootstrapContext::new(base, bp).unwrap();
    let cancel = AtomicBool::new(false);
    let circuit = RoundingCircuit::build(&bctx.packing, &bctx.params, &cancel).unwrap();
    let tables = RaiseTables::new(&bctx);
    let mut sampler = Sampler::new(31337, 3.2);
    let (sk, pk) = keygen(&bctx.base, &mut sampler).unwrap();
    let keys = gen_bootstrap_keys(&bctx, &circuit, &sk, &mut sampler).unwrap();
    let eval = bgv_core::gen_eval_keys(&bctx.base, &sk, &[], &mut sampler).unwrap();

    let vals = vec![2i64, -1];
    let coeffs = bctx.packing.thin_encode(&vals, 1).unwrap();
    let ct = encrypt(&bctx.base, &pk, &coeffs, &mut sampler).unwrap();
    let sq = bgv_core::he_mul(&bctx.base, &ct, &ct, &eval.relin).unwrap();
    let sq = bgv_core::mod_switch(&bctx.base, &sq).unwrap();
    let sq2 = bgv_core::he_mul(&bctx.base, &sq, &sq, &eval.relin).unwrap();
    let sq2 = bgv_core::mod_switch(&bctx.base, &sq2).unwrap();
    let expect: Vec<i64> = vals
        .iter()
        .map(|&v| rns_ring::mont::centered_rem((v * v * v * v) as i128, 5))
        .collect();

    let out = bootstrap(&bctx, &circuit, &tables, &keys, &sq2).unwrap();
    let dec = decrypt(&bctx.work, &sk, &out).unwrap();
    assert_eq!(bctx.packing.thin_decode(&dec.message, 1), expect);
}
