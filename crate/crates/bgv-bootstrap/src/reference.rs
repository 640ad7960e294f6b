//! Plain-integer reference of the rounding decryption identity that the
//! homomorphic pipeline reproduces.  Tests use these as oracles; nothing
//! here touches ciphertexts.
//!
//! For a ciphertext (c0, c1) mod q with plaintext modulus p^r and raised
//! precision e:
//!
//!   c_i' = [p^(e-r) * c_i]_q          (per part, reduced before summing)
//!   w    = [q^(-1) * (c0' + c1' s)]_{p^e}
//!   m    = [q * round(w / p^(e-r))]_{p^r}
//!
//! The inner product is taken over the integers; only the per-part
//! reduction happens mod q.  Correctness needs the remaining noise to be
//! at least (e - r) log2 p bits below the budget ceiling.

use bgv_core::arith::inv_mod_u64;
use rns_ring::mont::centered_rem;

/// Nearest integer of a/d for odd positive d; ties cannot occur.
pub fn round_div(a: i128, d: i128) -> i128 {
    debug_assert!(d > 0);
    (2 * a + d).div_euclid(2 * d)
}

/// Scalar form, for the degree-zero corner and exhaustive sweeps.
pub fn round_decrypt_scalar(c0: i64, c1: i64, s: i64, q: u64, p: u64, e: u32, r: u32) -> i64 {
    let per = p.pow(e - r) as i128;
    let pe = p.pow(e);
    let pr = p.pow(r);
    let c0p = centered_rem(c0 as i128 * per, q);
    let c1p = centered_rem(c1 as i128 * per, q);
    let inner = c0p as i128 + c1p as i128 * s as i128;
    let qinv = inv_mod_u64(q % pe, pe).expect("q coprime to p");
    let wc = centered_rem(inner, pe);
    let w = centered_rem(qinv as i128 * wc as i128, pe);
    let alpha = round_div(w as i128, per);
    centered_rem(q as i128 * alpha, pr)
}

/// Negacyclic schoolbook c1' * s over the integers.
fn negacyclic_mul(a: &[i64], b: &[i64]) -> Vec<i128> {
    let n = a.len();
    let mut acc = vec![0i128; n];
    for i in 0..n {
        if a[i] == 0 {
            continue;
        }
        for j in 0..n {
            let k = i + j;
            let prod = a[i] as i128 * b[j] as i128;
            if k < n {
                acc[k] += prod;
            } else {
                acc[k - n] -= prod;
            }
        }
    }
    acc
}

/// Polynomial form over R = Z[X]/(X^N + 1).  `q` must fit u64.
pub fn round_decrypt_poly(
    c0: &[i64],
    c1: &[i64],
    s: &[i64],
    q: u64,
    p: u64,
    e: u32,
    r: u32,
) -> Vec<i64> {
    assert_eq!(c0.len(), c1.len());
    assert_eq!(c0.len(), s.len());
    let per = p.pow(e - r) as i128;
    let pe = p.pow(e);
    let pr = p.pow(r);
    let qinv = inv_mod_u64(q % pe, pe).expect("q coprime to p") as i128;

    let c0p: Vec<i64> = c0.iter().map(|&c| centered_rem(c as i128 * per, q)).collect();
    let c1p: Vec<i64> = c1.iter().map(|&c| centered_rem(c as i128 * per, q)).collect();
    let c1s = negacyclic_mul(&c1p, s);
    c0p.iter()
        .zip(&c1s)
        .map(|(&a, &b)| {
            let wc = centered_rem(a as i128 + b, pe);
            let w = centered_rem(qinv * wc as i128, pe);
            let alpha = round_div(w as i128, per);
            centered_rem(q as i128 * alpha, pr)
        })
        .collect()
}
