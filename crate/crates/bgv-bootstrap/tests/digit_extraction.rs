//! Digit polynomial tables and the scalar extraction loop, checked
//! exhaustively for small p and by sampling for p = 127.

use bgv_bootstrap::digits::{balanced_digits, digit_poly, extract_scalar};
use bgv_bootstrap::reference::round_div;
use bgv_core::arith::pow_mod_u64;
use rand::{Rng, SeedableRng};
use rns_ring::mont::centered_rem;

fn eval_poly(table: &[i64], y: u64, m: u64) -> i64 {
    let mut acc = 0i128;
    for &c in table.iter().rev() {
        acc = centered_rem(acc * y as i128 + c as i128, m) as i128;
    }
    acc as i64
}

#[test]
fn balanced_digit_sets() {
    assert_eq!(balanced_digits(3), vec![-1, 0, 1]);
    assert_eq!(balanced_digits(5), vec![-2, -1, 0, 1, 2]);
    assert_eq!(balanced_digits(7).len(), 7);
}

#[test]
fn digit_poly_recovers_lowest_digit_exhaustively() {
    for &p in &[3u64, 5] {
        for j in 2..=4u32 {
            let m = p.pow(j);
            let table = digit_poly(p, j);
            assert_eq!(table.len(), p as usize);
            for v in 0..m {
                let d = centered_rem(v as i128, p);
                let y = pow_mod_u64(v, p.pow(j - 1), m);
                let got = eval_poly(&table, y, m);
                assert_eq!(got, d, "p = {p}, j = {j}, v = {v}");
            }
        }
    }
}

#[test]
fn digit_poly_at_large_prime() {
    let p = 127u64;
    let table = digit_poly(p, 2);
    let m = p * p;
    for v in 0..m {
        let d = centered_rem(v as i128, p);
        let y = pow_mod_u64(v, p, m);
        assert_eq!(eval_poly(&table, y, m), d);
    }

    let table3 = digit_poly(p, 3);
    let m3 = p * p * p;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(127);
    for _ in 0..2000 {
        let v = rng.gen_range(0..m3);
        let d = centered_rem(v as i128, p);
        let y = pow_mod_u64(v, p * p, m3);
        assert_eq!(eval_poly(&table3, y, m3), d);
    }
}

#[test]
fn scalar_extraction_equals_balanced_rounding() {
    for &p in &[3u64, 5] {
        for e in 2..=4u32 {
            for r in 1..e {
                let pe = p.pow(e) as i64;
                let lift = p.pow(e - r) as i128;
                for w in -pe / 2..=pe / 2 {
                    let got = extract_scalar(w, p, e, r);
                    let expect = centered_rem(round_div(w as i128, lift), p.pow(r));
                    assert_eq!(got, expect, "p = {p}, e = {e}, r = {r}, w = {w}");
                }
            }
        }
    }
}

#[test]
fn scalar_extraction_spot_checks() {
    // p = 5, e = 3, r = 1: the frozen chain rounds 23 to digit 1.
    assert_eq!(extract_scalar(23, 5, 3, 1), 1);
    assert_eq!(extract_scalar(-23, 5, 3, 1), -1);
    assert_eq!(extract_scalar(62, 5, 3, 1), 2);
    assert_eq!(extract_scalar(12, 5, 3, 1), 0);
    assert_eq!(extract_scalar(13, 5, 3, 1), 1);
}
