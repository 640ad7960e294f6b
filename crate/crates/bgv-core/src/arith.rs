//! Scalar modular arithmetic helpers for moduli that need not be prime
//! (plaintext prime powers, composite products).

/// Extended-Euclid inverse of a mod m, if gcd(a, m) = 1.
pub fn inv_mod_u64(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r.abs() != 1 {
        return None;
    }
    // old_r may be -1 when the loop exits on a negative remainder chain
    let mut inv = old_s * old_r.signum();
    inv %= m as i128;
    if inv < 0 {
        inv += m as i128;
    }
    Some(inv as u64)
}

pub fn pow_mod_u64(a: u64, mut e: u64, m: u64) -> u64 {
    let mut base = (a % m) as u128;
    let mut acc = 1u128 % m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m as u128;
        }
        base = base * base % m as u128;
        e >>= 1;
    }
    acc as u64
}

/// a * b mod m with 128-bit intermediates.
pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

/// Centered representative in [-m/2, m/2) of a mod m.
pub fn centered_u64(a: u64, m: u64) -> i64 {
    let r = a % m;
    if 2 * (r as u128) >= m as u128 {
        r as i64 - m as i64
    } else {
        r as i64
    }
}
