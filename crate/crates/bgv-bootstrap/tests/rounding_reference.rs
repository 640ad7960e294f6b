//! The scalar and polynomial rounding-decryption references against
//! direct decryption, on values small enough that the junk digits must
//! round away.

use bgv_bootstrap::reference::{round_decrypt_poly, round_decrypt_scalar, round_div};
use rand::{Rng, SeedableRng};
use rns_ring::mont::centered_rem;

#[test]
fn worked_example_value_chain() {
    // q = 97, p = 5, e = 3, r = 1, c0 = 7, c1 = s = 0.
    // Premultiply: [25 * 7]_97 = 175 - 194 = -19.
    // Inner product times q^(-1) mod 125: 97^(-1) = 58, [58 * -19]_125 = 23.
    // Round 23 / 25 -> 1, and [97 * 1]_5 = 2 = [7]_5.
    assert_eq!(centered_rem(25 * 7, 97), -19);
    assert_eq!(centered_rem(58 * -19, 125), 23);
    assert_eq!(round_div(23, 25), 1);
    assert_eq!(centered_rem(97, 5), 2);
    assert_eq!(round_decrypt_scalar(7, 0, 0, 97, 5, 3, 1), 2);
}

#[test]
fn rounding_is_exact_division_plus_nearest() {
    assert_eq!(round_div(23, 25), 1);
    assert_eq!(round_div(-23, 25), -1);
    assert_eq!(round_div(12, 25), 0);
    assert_eq!(round_div(13, 25), 1);
    assert_eq!(round_div(-12, 25), 0);
    assert_eq!(round_div(-13, 25), -1);
    assert_eq!(round_div(50, 25), 2);
    assert_eq!(round_div(0, 25), 0);
}

/// Largest |noise| = |c0 + c1 s mod q| the lemma tolerates for a given
/// secret bound, leaving one unit of slack.
fn noise_cap(q: u64, s_l1: i64, p: u64, er: u32) -> i64 {
    let lift = p.pow(er) as f64;
    let room = lift / 2.0 - (1.0 + s_l1 as f64) / 2.0 - 1.0;
    assert!(room > 0.0);
    (room * q as f64 / lift) as i64
}

#[test]
fn scalar_reference_matches_direct_decryption() {
    for &(q, p, e, r, s_max) in &[
        (97u64, 5u64, 3u32, 1u32, 9i64),
        (18721, 5, 3, 1, 9),
        (12289, 3, 4, 2, 4),
    ] {
        let cap = noise_cap(q, s_max, p, e - r);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(q ^ 0xb0b);
        let half = (q / 2) as i64;
        for _ in 0..4000 {
            let c1 = rng.gen_range(-half..=half);
            let s = rng.gen_range(-s_max..=s_max);
            let v = rng.gen_range(-cap..=cap);
            // choose c0 so the decrypted value is v exactly
            let c0 = centered_rem(v as i128 - c1 as i128 * s as i128, q);
            let direct = centered_rem(v as i128, p.pow(r));
            assert_eq!(round_decrypt_scalar(c0, c1, s, q, p, e, r), direct);
        }
    }
}

fn negacyclic_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let n = a.len();
    let mut acc = vec![0i128; n];
    for i in 0..n {
        for j in 0..n {
            let prod = a[i] as i128 * b[j] as i128;
            if i + j < n {
                acc[i + j] += prod;
            } else {
                acc[i + j - n] -= prod;
            }
        }
    }
    acc.into_iter().map(|v| v as i64).collect()
}

#[test]
fn poly_reference_matches_direct_decryption() {
    let q = 18721u64;
    let (p, e, r) = (5u64, 3u32, 1u32);
    let n = 16;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(991);
    for trial in 0..60 {
        let s: Vec<i64> = (0..n).map(|_| rng.gen_range(-1i64..=1)).collect();
        let l1: i64 = s.iter().map(|v| v.abs()).sum();
        let cap = noise_cap(q, l1, p, e - r);
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-cap..=cap)).collect();
        let c1: Vec<i64> = (0..n)
            .map(|_| rng.gen_range(-((q / 2) as i64)..=(q / 2) as i64))
            .collect();
        let c1s = negacyclic_mul(&c1, &s);
        let c0: Vec<i64> = v
            .iter()
            .zip(&c1s)
            .map(|(&vi, &cs)| centered_rem(vi as i128 - cs as i128, q))
            .collect();
        let got = round_decrypt_poly(&c0, &c1, &s, q, p, e, r);
        let expect: Vec<i64> = v
            .iter()
            .map(|&vi| centered_rem(vi as i128, p.pow(r)))
            .collect();
        assert_eq!(got, expect, "trial {trial}");
    }
}
