//! Bound checks for the RNS base-extension kernels against a big-integer
//! CRT oracle, plus the exact-division and raised-modulus encryption paths.

use bgv_core::*;
use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rns_ring::{Domain, ResiduePoly};

fn residue_set(ctx: &BgvContext, count: usize) -> Vec<rns_ring::NttPrime> {
    ctx.chain.q_primes[..count].to_vec()
}

fn residues_of(x: &[BigInt], prime: rns_ring::NttPrime) -> ResiduePoly {
    let coeffs = x.iter().map(|v| crt::big_mod_prime(v, prime.q)).collect();
    ResiduePoly::from_coeffs(prime, Domain::Coefficient, coeffs)
}

#[test]
fn base_extension_error_is_multiple_of_source_product() {
    let ctx = BgvContext::new(BgvParams::desk_cosim()).unwrap();
    let source = residue_set(&ctx, 3);
    let target = ctx.chain.p_primes.clone();
    let table = FbeTable::new(&source, &target);
    let basis = CrtBasis::new(&source);
    let a_big: BigInt = source.iter().map(|p| BigInt::from(p.q)).product();
    let k = BigInt::from(source.len());

    let mut rng = ChaCha12Rng::seed_from_u64(991);
    let n = ctx.n();
    for _ in 0..20 {
        let x_big: Vec<BigInt> = (0..n)
            .map(|_| BigInt::from(rng.gen_range(-(1i64 << 40)..(1i64 << 40))))
            .collect();
        let inputs: Vec<ResiduePoly> =
            source.iter().map(|&p| residues_of(&x_big, p)).collect();
        let refs: Vec<&ResiduePoly> = inputs.iter().collect();
        let extended = table.extend(&refs);
        for i in 0..n {
            // the lift of the source residues is x_big plus a multiple of A
            let lifted = basis.lift_symmetric(
                &inputs.iter().map(|rp| rp.coeffs[i]).collect::<Vec<_>>(),
            );
            let err = (&lifted - &x_big[i]) % &a_big;
            assert_eq!(err, BigInt::from(0));
            // what extend() computed must equal some x + A*r with |r| <= k/2
            for (j, &pj) in target.iter().enumerate() {
                let got = extended[j].coeffs[i].rem_euclid(pj.q as i64);
                let mut matched = None;
                let half = (source.len() / 2 + 1) as i64;
                for r in -half..=half {
                    let cand = &x_big[i] + &a_big * r;
                    if crt::big_mod_prime_std(&cand, pj.q) as i64 == got {
                        matched = Some(r);
                        break;
                    }
                }
                let r = matched.expect("output not of the form x + A*r");
                assert!(
                    BigInt::from(2 * r.abs()) <= k,
                    "junk multiple {r} exceeds k/2"
                );
            }
        }
    }
}

#[test]
fn small_montgomery_reduction_stays_bounded() {
    let ctx = BgvContext::new(BgvParams::desk_cosim()).unwrap();
    let dropped = residue_set(&ctx, 3);
    let kept = ctx.chain.p_primes.clone();
    let m_big = BigInt::from(3125u32);
    let table = SmallMontTable::new(&dropped, &kept, &m_big);
    let d_big: BigInt = dropped.iter().map(|p| BigInt::from(p.q)).product();
    let d_inv = d_big.modinv(&m_big).unwrap();
    // |out| <= (m/2)(1 + k) with k dropped primes each adding at most m/2
    let bound = (&m_big * BigInt::from(1 + dropped.len() as i64)) / 2 + 1;
    let s_basis = CrtBasis::new(&kept);

    let mut rng = ChaCha12Rng::seed_from_u64(1303);
    let n = ctx.n();
    for _ in 0..20 {
        let x_big: Vec<BigInt> = (0..n)
            .map(|_| BigInt::from(rng.gen_range(-(1i64 << 48)..(1i64 << 48))))
            .collect();
        let xd: Vec<ResiduePoly> = dropped.iter().map(|&p| residues_of(&x_big, p)).collect();
        let xs: Vec<ResiduePoly> = kept.iter().map(|&p| residues_of(&x_big, p)).collect();
        let out = table.reduce(
            &xd.iter().collect::<Vec<_>>(),
            &xs.iter().collect::<Vec<_>>(),
        );
        for i in 0..n {
            let c = s_basis.lift_symmetric(
                &out.iter().map(|rp| rp.coeffs[i]).collect::<Vec<_>>(),
            );
            assert!(c.abs() <= bound, "output {c} exceeds bound {bound}");
            let want = (&x_big[i] * &d_inv) % &m_big;
            assert_eq!(
                ((&c - want) % &m_big + &m_big) % &m_big,
                BigInt::from(0),
                "congruence mod m broken at coeff {i}"
            );
        }
    }
}

#[test]
fn exact_division_rescales_plaintext_space() {
    let ctx = BgvContext::new(BgvParams::desk_cosim()).unwrap();
    let mut sampler = Sampler::new(77, ctx.params.sigma);
    let (sk, _pk) = keygen(&ctx, &mut sampler).unwrap();
    // work mod 5^3, encrypt multiples of 5, divide down to mod 5^2
    let t = 125u64;
    let n = ctx.n();
    let m: Vec<i64> = (0..n).map(|i| (((i * 7 + 3) % 25) as i64 - 12) * 5).collect();
    let ct = encrypt_at_level(&ctx, &sk, &m, t, ctx.top_level(), &mut sampler).unwrap();
    let out = decrypt(&ctx, &sk, &ct).unwrap();
    assert_eq!(out.message, m);
    let noise_before = out.noise_bits;
    let divided = he_exact_divide_by(&ctx, &ct, 5).unwrap();
    assert_eq!(divided.plain_modulus, 25);
    let out = decrypt(&ctx, &sk, &divided).unwrap();
    let expect: Vec<i64> = m
        .iter()
        .map(|&v| rns_ring::mont::centered_rem((v / 5) as i128, 25))
        .collect();
    assert_eq!(out.message, expect);
    assert!(
        (out.noise_bits - noise_before).abs() < 1.0,
        "division is noise-free: {} -> {}",
        noise_before,
        out.noise_bits
    );
}

#[test]
fn symmetric_encryption_at_lower_level_roundtrips() {
    let ctx = BgvContext::new(BgvParams::desk_cosim()).unwrap();
    let mut sampler = Sampler::new(500, ctx.params.sigma);
    let (sk, _pk) = keygen(&ctx, &mut sampler).unwrap();
    let t = ctx.params.plain_modulus;
    let m = sampler.uniform_plain(ctx.n(), t);
    for level in 1..=ctx.top_level() {
        let ct = encrypt_at_level(&ctx, &sk, &m, t, level, &mut sampler).unwrap();
        assert_eq!(ct.level, level);
        assert_eq!(decrypt(&ctx, &sk, &ct).unwrap().message, m);
    }
}
