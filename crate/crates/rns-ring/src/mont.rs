//! Montgomery multiplication modulo NTT-friendly primes with radix R = 2^32.
//!
//! Every chain prime satisfies q = 1 (mod 2^(n_log + 1)), so the low
//! n_log + 1 bits of q are the fixed pattern 0...01.  This makes
//! -q^(-1) = -1 (mod 2^w) for any w <= n_log + 1, and the REDC step for a
//! w-bit chunk collapses to a ceiling shift plus one multiplication by the
//! high part c = (q - 1) >> (n_log + 1).  `mont_reduce` walks 32 bits of
//! radix in such chunks; `mont_reduce_generic` is the textbook word-level
//! REDC kept as an independent reference path.
//!
//! Residue values cross the public API in standard form, reduced
//! symmetrically into [-q/2, q/2).  Twiddle and constant tables are held in
//! Montgomery form internally, so one `mont_mul_u32` per butterfly yields a
//! standard-form product.

/// Ceiling-shift REDC specialized to primes whose low `low_fixed` bits are 0...01.
#[inline]
pub fn mont_reduce(t: u64, q: u32, low_fixed: u32) -> u32 {
    debug_assert!(low_fixed >= 1 && low_fixed <= 31);
    debug_assert_eq!((q as u64) & ((1u64 << low_fixed) - 1), 1);
    let c = ((q - 1) >> low_fixed) as u64;
    let mut t = t;
    let mut remaining = 32u32;
    while remaining > 0 {
        let w = remaining.min(low_fixed);
        let mask = (1u64 << w) - 1;
        let lo = t & mask;
        // u = (-t) mod 2^w; (t + u*q) / 2^w = ceil(t / 2^w) + u * c * 2^(low_fixed - w)
        let u = mask + 1 - lo;
        let u = if lo == 0 { 0 } else { u };
        t = (t >> w) + (lo != 0) as u64 + u * c * (1u64 << (low_fixed - w));
        remaining -= w;
    }
    let q = q as u64;
    if t >= q {
        (t - q) as u32
    } else {
        t as u32
    }
}

/// Textbook REDC using the precomputed factor -q^(-1) mod 2^32.
#[inline]
pub fn mont_reduce_generic(t: u64, q: u32, neg_q_inv: u32) -> u32 {
    let m = (t as u32).wrapping_mul(neg_q_inv);
    let r = ((t as u128 + m as u128 * q as u128) >> 32) as u64;
    let q = q as u64;
    if r >= q {
        (r - q) as u32
    } else {
        r as u32
    }
}

/// q^(-1) mod 2^32 by Newton iteration (q odd).
pub fn inv_mod_2_32(q: u32) -> u32 {
    let mut inv = q; // correct mod 2^3 for odd q? q*q = 1 mod 8, so inv=q is correct mod 8
    for _ in 0..5 {
        inv = inv.wrapping_mul(2u32.wrapping_sub(q.wrapping_mul(inv)));
    }
    debug_assert_eq!(q.wrapping_mul(inv), 1);
    inv
}

/// a * b * 2^(-32) mod q on standard-form u32 inputs, optimized path.
#[inline]
pub fn mont_mul_u32(a: u32, b: u32, q: u32, low_fixed: u32) -> u32 {
    mont_reduce(a as u64 * b as u64, q, low_fixed)
}

/// a * b * 2^(-32) mod q, generic reference path.
#[inline]
pub fn mont_mul_u32_generic(a: u32, b: u32, q: u32, neg_q_inv: u32) -> u32 {
    mont_reduce_generic(a as u64 * b as u64, q, neg_q_inv)
}

/// Plain modular product a * b mod q via 128-bit widening.
#[inline]
pub fn mul_mod_u32(a: u32, b: u32, q: u32) -> u32 {
    ((a as u64 * b as u64) % q as u64) as u32
}

/// a^e mod q.
pub fn pow_mod(a: u32, mut e: u64, q: u32) -> u32 {
    let mut base = a % q;
    let mut acc: u32 = 1 % q;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u32(acc, base, q);
        }
        base = mul_mod_u32(base, base, q);
        e >>= 1;
    }
    acc
}

/// a^(-1) mod q for prime q.
pub fn inv_mod(a: u32, q: u32) -> u32 {
    debug_assert!(a % q != 0);
    pow_mod(a, q as u64 - 2, q)
}

/// Map a symmetric representative in [-q/2, q/2) to standard form [0, q).
#[inline]
pub fn to_unsigned(v: i64, q: u32) -> u32 {
    debug_assert!(2 * v >= -(q as i64) && 2 * v < q as i64, "v={v} q={q}");
    if v < 0 {
        (v + q as i64) as u32
    } else {
        v as u32
    }
}

/// Map standard form [0, q) to the symmetric representative in [-q/2, q/2).
#[inline]
pub fn to_centered(v: u32, q: u32) -> i64 {
    if 2 * (v as u64) >= q as u64 {
        v as i64 - q as i64
    } else {
        v as i64
    }
}

/// Symmetric representative of an arbitrary integer mod m (m odd or even),
/// with the half-open convention that +m/2 maps to -m/2.
#[inline]
pub fn centered_rem(v: i128, m: u64) -> i64 {
    let m = m as i128;
    let mut r = v % m;
    if r < 0 {
        r += m;
    }
    if 2 * r >= m {
        r -= m;
    }
    r as i64
}

/// Centered addition within [-q/2, q/2).
#[inline]
pub fn add_centered(a: i64, b: i64, q: u32) -> i64 {
    let q = q as i64;
    let mut s = a + b;
    if 2 * s >= q {
        s -= q;
    } else if 2 * s < -q {
        s += q;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRIMES: &[(u32, u32)] = &[
        (97, 4),           // 97 = 6*16 + 1, n_log = 3
        (7681, 9),         // 7681 = 15*512 + 1
        (0xFFF0_0001, 17), // 32760 * 2^17 + 1, n_log = 16
    ];

    #[test]
    fn reduce_matches_generic_on_fixed_cases() {
        for &(q, low) in PRIMES {
            let neg = inv_mod_2_32(q).wrapping_neg();
            for t in [0u64, 1, q as u64, (q as u64 - 1) * (q as u64 - 1), u32::MAX as u64] {
                assert_eq!(mont_reduce(t, q, low), mont_reduce_generic(t, q, neg));
            }
        }
    }

    #[test]
    fn centered_roundtrip() {
        let q = 97;
        for v in 0..q {
            let c = to_centered(v, q);
            assert!((-48..=48).contains(&c));
            assert_eq!(to_unsigned(c, q), v);
        }
        assert_eq!(centered_rem(50, 100), -50);
        assert_eq!(centered_rem(-50, 100), -50);
        assert_eq!(centered_rem(49, 100), 49);
    }

    #[test]
    fn pow_and_inv() {
        assert_eq!(pow_mod(3, 4, 97), 81 % 97);
        for a in 1..97u32 {
            assert_eq!(mul_mod_u32(a, inv_mod(a, 97), 97), 1);
        }
    }
}
