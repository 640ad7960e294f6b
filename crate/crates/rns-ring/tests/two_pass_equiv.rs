//! The two-pass transform must agree with the direct transform exactly for
//! every supported split, and the optimized Montgomery reduction must agree
//! with an independent big-integer evaluation.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rns_ring::mont::{inv_mod_2_32, mont_reduce, mont_reduce_generic};
use rns_ring::{
    generate_prime_chain, intt_two_pass, ntt_direct, ntt_two_pass, Domain, NttTable, ResiduePoly,
    TwoPassTwiddles,
};

#[test]
fn two_pass_equals_direct_across_shapes() {
    let mut rng = ChaCha12Rng::seed_from_u64(21);
    for (n_log, radix) in [(4u32, 4usize), (4, 8), (6, 8), (8, 16), (10, 32), (12, 64)] {
        let prime = generate_prime_chain(n_log, n_log + 11, 1).unwrap()[0];
        let table = NttTable::new(prime);
        let tw = TwoPassTwiddles::new(prime, radix).unwrap();
        let q = prime.q as i64;
        for trial in 0..3 {
            let coeffs: Vec<i64> = (0..prime.n())
                .map(|_| rng.gen_range(-(q / 2)..(q + 1) / 2))
                .collect();
            let x = ResiduePoly::from_coeffs(prime, Domain::Coefficient, coeffs);
            let direct = ntt_direct(&x, &table);
            let two = ntt_two_pass(&x, &tw);
            assert_eq!(two, direct, "n_log = {n_log} radix = {radix} trial = {trial}");
            assert_eq!(intt_two_pass(&two, &tw), x);
        }
    }
}

/// Big-integer oracle for a * b * 2^(-32) mod q, using a modular inverse
/// computed by num-bigint rather than any REDC identity.
fn mont_oracle(a: u32, b: u32, q: u32) -> u32 {
    let r_inv = BigUint::from(1u64 << 32).modinv(&BigUint::from(q)).unwrap();
    (BigUint::from(a) * BigUint::from(b) * r_inv % BigUint::from(q))
        .to_u32()
        .unwrap()
}

#[test]
fn optimized_reduction_matches_big_integer_oracle() {
    let mut rng = ChaCha12Rng::seed_from_u64(22);
    for (n_log, bits) in [(3u32, 7u32), (8, 21), (16, 32), (16, 31)] {
        let prime = generate_prime_chain(n_log, bits, 1).unwrap()[0];
        let q = prime.q;
        let neg = inv_mod_2_32(q).wrapping_neg();
        for _ in 0..10_000 {
            let a = rng.gen_range(0..q);
            let b = rng.gen_range(0..q);
            let fast = mont_reduce(a as u64 * b as u64, q, prime.low_fixed);
            let generic = mont_reduce_generic(a as u64 * b as u64, q, neg);
            assert_eq!(fast, generic);
            assert_eq!(fast, mont_oracle(a, b, q), "a={a} b={b} q={q}");
        }
    }
}
