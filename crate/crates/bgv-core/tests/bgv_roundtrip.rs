//! End-to-end encrypt/evaluate/decrypt checks against a plaintext oracle.
//! The oracle computes in Z_t[X]/(X^N + 1) with schoolbook arithmetic.

use bgv_core::*;

fn plain_add(a: &[i64], b: &[i64], t: u64) -> Vec<i64> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| rns_ring::mont::centered_rem(x as i128 + y as i128, t))
        .collect()
}

fn plain_negacyclic_mul(a: &[i64], b: &[i64], t: u64) -> Vec<i64> {
    let n = a.len();
    let mut acc = vec![0i128; n];
    for i in 0..n {
        for j in 0..n {
            let k = i + j;
            let p = a[i] as i128 * b[j] as i128;
            if k < n {
                acc[k] += p;
            } else {
                acc[k - n] -= p;
            }
        }
    }
    acc.into_iter()
        .map(|v| rns_ring::mont::centered_rem(v, t))
        .collect()
}

fn plain_automorphism(a: &[i64], k: usize, t: u64) -> Vec<i64> {
    let n = a.len();
    let mut out = vec![0i64; n];
    for (i, &c) in a.iter().enumerate() {
        let e = (i * k) % (2 * n);
        let v = if e >= n { -c } else { c };
        out[e % n] = rns_ring::mont::centered_rem(v as i128, t);
    }
    out
}

fn setup() -> (BgvContext, SecretKey, PublicKey, EvalKeys, Sampler) {
    let ctx = BgvContext::new(BgvParams::desk_cosim()).unwrap();
    let mut sampler = Sampler::new(4242, ctx.params.sigma);
    let (sk, pk) = keygen(&ctx, &mut sampler).unwrap();
    let keys = gen_eval_keys(&ctx, &sk, &[3, 5, 31], &mut sampler).unwrap();
    (ctx, sk, pk, keys, sampler)
}

#[test]
fn encrypt_decrypt_roundtrip() {
    let (ctx, sk, pk, _keys, mut sampler) = setup();
    let t = ctx.params.plain_modulus;
    for _ in 0..5 {
        let m = sampler.uniform_plain(ctx.n(), t);
        let ct = encrypt(&ctx, &pk, &m, &mut sampler).unwrap();
        let out = decrypt(&ctx, &sk, &ct).unwrap();
        assert_eq!(out.message, m);
        assert!(out.budget_bits > 40.0, "budget {}", out.budget_bits);
    }
}

#[test]
fn addition_matches_oracle() {
    let (ctx, sk, pk, _keys, mut sampler) = setup();
    let t = ctx.params.plain_modulus;
    let ma = sampler.uniform_plain(ctx.n(), t);
    let mb = sampler.uniform_plain(ctx.n(), t);
    let ca = encrypt(&ctx, &pk, &ma, &mut sampler).unwrap();
    let cb = encrypt(&ctx, &pk, &mb, &mut sampler).unwrap();
    let sum = he_add(&ctx, &ca, &cb).unwrap();
    assert_eq!(decrypt(&ctx, &sk, &sum).unwrap().message, plain_add(&ma, &mb, t));
    let diff = he_sub(&ctx, &ca, &cb).unwrap();
    let expect: Vec<i64> = ma
        .iter()
        .zip(&mb)
        .map(|(&x, &y)| rns_ring::mont::centered_rem(x as i128 - y as i128, t))
        .collect();
    assert_eq!(decrypt(&ctx, &sk, &diff).unwrap().message, expect);
}

#[test]
fn multiplication_matches_oracle() {
    let (ctx, sk, pk, keys, mut sampler) = setup();
    let t = ctx.params.plain_modulus;
    let ma = sampler.uniform_plain(ctx.n(), t);
    let mb = sampler.uniform_plain(ctx.n(), t);
    let ca = encrypt(&ctx, &pk, &ma, &mut sampler).unwrap();
    let cb = encrypt(&ctx, &pk, &mb, &mut sampler).unwrap();
    let prod = he_mul(&ctx, &ca, &cb, &keys.relin).unwrap();
    let out = decrypt(&ctx, &sk, &prod).unwrap();
    assert_eq!(out.message, plain_negacyclic_mul(&ma, &mb, t));
    assert_eq!(prod.parts.len(), 2);
}

#[test]
fn mod_switch_preserves_message_and_sheds_noise() {
    let (ctx, sk, pk, _keys, mut sampler) = setup();
    let t = ctx.params.plain_modulus;
    let m = sampler.uniform_plain(ctx.n(), t);
    let ct = encrypt(&ctx, &pk, &m, &mut sampler).unwrap();
    let before = decrypt(&ctx, &sk, &ct).unwrap();
    let switched = mod_switch(&ctx, &ct).unwrap();
    assert_eq!(switched.level, ct.level - 1);
    let after = decrypt(&ctx, &sk, &switched).unwrap();
    assert_eq!(after.message, m, "message survives the drop");
    assert!(
        after.noise_bits <= before.noise_bits + 1.0,
        "noise must not grow: {} -> {}",
        before.noise_bits,
        after.noise_bits
    );
    // down to the bottom of the chain
    let bottom = mod_switch_to_level(&ctx, &ct, 1).unwrap();
    assert_eq!(decrypt(&ctx, &sk, &bottom).unwrap().message, m);
}

#[test]
fn kappa_tracks_through_mixed_circuits() {
    let (ctx, sk, pk, keys, mut sampler) = setup();
    let t = ctx.params.plain_modulus;
    let ma = sampler.uniform_plain(ctx.n(), t);
    let mb = sampler.uniform_plain(ctx.n(), t);
    let ca = encrypt(&ctx, &pk, &ma, &mut sampler).unwrap();
    let cb = encrypt(&ctx, &pk, &mb, &mut sampler).unwrap();
    // drop ca one level, leave cb fresh, then align and add: the two arrive
    // with different correction factors
    let ca_low = mod_switch(&ctx, &ca).unwrap();
    let cb_low = mod_switch_to_level(&ctx, &cb, ca_low.level).unwrap();
    assert_eq!(ca_low.kappa, cb_low.kappa);
    let sum = he_add(&ctx, &ca_low, &cb_low).unwrap();
    assert_eq!(decrypt(&ctx, &sk, &sum).unwrap().message, plain_add(&ma, &mb, t));

    // multiply then switch: kappa becomes a product times an inverse
    let prod = he_mul(&ctx, &ca, &cb, &keys.relin).unwrap();
    let prod_low = mod_switch(&ctx, &prod).unwrap();
    assert_ne!(prod_low.kappa, 1);
    assert_eq!(
        decrypt(&ctx, &sk, &prod_low).unwrap().message,
        plain_negacyclic_mul(&ma, &mb, t)
    );
}

#[test]
fn automorphism_matches_oracle_and_permutes_slots() {
    let (ctx, sk, pk, keys, mut sampler) = setup();
    let t = ctx.params.plain_modulus;
    let m = sampler.uniform_plain(ctx.n(), t);
    let ct = encrypt(&ctx, &pk, &m, &mut sampler).unwrap();
    for k in [3usize, 5, 31] {
        let rot = he_automorphism(&ctx, &ct, k, keys.rotation(k).unwrap()).unwrap();
        let out = decrypt(&ctx, &sk, &rot).unwrap();
        assert_eq!(out.message, plain_automorphism(&m, k, t), "k = {k}");
    }
    // slot view: X -> X^3 permutes the 16 slots of t = 97
    let packing = Packing::new(ctx.params.n_log, t, 1).unwrap();
    let vals = packing.thin_decode(&m, 1);
    let rot = he_automorphism(&ctx, &ct, 3, keys.rotation(3).unwrap()).unwrap();
    let got = packing.thin_decode(&decrypt(&ctx, &sk, &rot).unwrap().message, 1);
    let perm = packing.slot_perm(3).unwrap();
    let expect: Vec<i64> = perm.iter().map(|&s| vals[s]).collect();
    assert_eq!(got, expect);
}

#[test]
fn plain_mul_and_scalar_ops_match_oracle() {
    let (ctx, sk, pk, _keys, mut sampler) = setup();
    let t = ctx.params.plain_modulus;
    let m = sampler.uniform_plain(ctx.n(), t);
    let pt = sampler.uniform_plain(ctx.n(), t);
    let ct = encrypt(&ctx, &pk, &m, &mut sampler).unwrap();
    let prod = he_plain_mul(&ctx, &ct, &pt).unwrap();
    assert_eq!(
        decrypt(&ctx, &sk, &prod).unwrap().message,
        plain_negacyclic_mul(&m, &pt, t)
    );
    let scaled = he_scalar_mul(&ct, 7);
    let expect: Vec<i64> = m
        .iter()
        .map(|&x| rns_ring::mont::centered_rem(7 * x as i128, t))
        .collect();
    assert_eq!(decrypt(&ctx, &sk, &scaled).unwrap().message, expect);
    let shifted = he_add_scalar(&ct, 5);
    let expect: Vec<i64> = m
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let delta = if i == 0 { 5 } else { 0 };
            rns_ring::mont::centered_rem(x as i128 + delta, t)
        })
        .collect();
    assert_eq!(decrypt(&ctx, &sk, &shifted).unwrap().message, expect);
}

#[test]
fn deep_circuit_with_switching_stays_correct() {
    let (ctx, sk, pk, keys, mut sampler) = setup();
    let t = ctx.params.plain_modulus;
    let m = sampler.uniform_plain(ctx.n(), t);
    let mut ct = encrypt(&ctx, &pk, &m, &mut sampler).unwrap();
    let mut expect = m.clone();
    // square, switch, square, switch: depth 2 on a 4-prime chain
    for _ in 0..2 {
        ct = he_mul(&ctx, &ct, &ct, &keys.relin).unwrap();
        expect = plain_negacyclic_mul(&expect, &expect, t);
        ct = mod_switch(&ctx, &ct).unwrap();
        let out = decrypt(&ctx, &sk, &ct).unwrap();
        assert_eq!(out.message, expect);
        assert!(out.budget_bits > 0.0);
    }
}
