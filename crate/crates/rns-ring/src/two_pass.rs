//! Two-pass negacyclic NTT over an N1 x N2 split.
//!
//! The input vector is viewed as a matrix with x[N2 * n1 + n2] at row n1,
//! column n2.  Pass 1 transforms each column with an N1-point negacyclic
//! kernel and applies the cross twiddle (omega_N^n2)^k1; pass 2 transforms
//! each row of the intermediate with an N2-point cyclic kernel after a
//! psi^n2 twist.  The final placement
//!
//!   out[N2 * bitrev(k1) + b2] = pass2_output[b2]
//!
//! equals the full-length bit reversal of the evaluation index, so the
//! result is identical to `ntt_direct`: one canonical evaluation order for
//! every supported split.  The inverse runs the mirror image.

use crate::mont::{mont_mul_u32, to_centered, to_unsigned};
use crate::poly::{bitrev, Domain, ResiduePoly};
use crate::twiddle::{power_generator_mont, TwoPassTwiddles};

#[inline]
fn butterfly_dif(x: &mut [u32], tw_mont: &[u32], q: u32, low_fixed: u32) {
    let n = x.len();
    let qq = q as u64;
    let mut half = n / 2;
    while half >= 1 {
        let stride = n / (2 * half);
        for block in 0..stride {
            let base = block * 2 * half;
            for j in 0..half {
                let a = x[base + j] as u64;
                let b = x[base + j + half] as u64;
                let sum = a + b;
                let sum = if sum >= qq { sum - qq } else { sum };
                let diff = a + qq - b;
                let diff = if diff >= qq { diff - qq } else { diff };
                x[base + j] = sum as u32;
                x[base + j + half] = mont_mul_u32(diff as u32, tw_mont[j * stride], q, low_fixed);
            }
        }
        half /= 2;
    }
}

#[inline]
fn butterfly_dit(x: &mut [u32], tw_inv_mont: &[u32], q: u32, low_fixed: u32) {
    let n = x.len();
    let qq = q as u64;
    let mut half = 1;
    while half <= n / 2 {
        let stride = n / (2 * half);
        for block in 0..stride {
            let base = block * 2 * half;
            for j in 0..half {
                let a = x[base + j] as u64;
                let b = mont_mul_u32(x[base + j + half], tw_inv_mont[j * stride], q, low_fixed) as u64;
                let sum = a + b;
                let sum = if sum >= qq { sum - qq } else { sum };
                let diff = a + qq - b;
                let diff = if diff >= qq { diff - qq } else { diff };
                x[base + j] = sum as u32;
                x[base + j + half] = diff as u32;
            }
        }
        half *= 2;
    }
}

/// Forward two-pass transform into canonical evaluation order.
pub fn ntt_two_pass(poly: &ResiduePoly, tw: &TwoPassTwiddles) -> ResiduePoly {
    assert_eq!(poly.domain, Domain::Coefficient);
    assert_eq!(poly.prime.q, tw.prime.q);
    let (n1, n2) = (tw.n1, tw.n2);
    let n = n1 * n2;
    assert_eq!(poly.n(), n);
    let q = tw.prime.q;
    let lf = tw.prime.low_fixed;
    let m1 = n1.trailing_zeros();

    // Intermediate matrix, stored row b1 (bit-reversed k1), column n2.
    let mut mid = vec![0u32; n];
    let mut col = vec![0u32; n1];
    for c in 0..n2 {
        for r in 0..n1 {
            let v = to_unsigned(poly.coeffs[n2 * r + c], q);
            col[r] = mont_mul_u32(v, tw.pre_pass1[r], q, lf);
        }
        butterfly_dif(&mut col, &tw.butterfly_pass1, q, lf);
        // Cross factors (omega_N^c)^k1, synthesized from the column seed.
        let factors = power_generator_mont(tw.post_seeds[c], n1 - 1, &tw.prime);
        for (b1, &v) in col.iter().enumerate() {
            let k1 = bitrev(b1, m1);
            let scaled = if k1 == 0 {
                v
            } else {
                mont_mul_u32(v, factors[k1 - 1], q, lf)
            };
            mid[n2 * b1 + c] = scaled;
        }
    }

    let mut out = vec![0i64; n];
    let mut row = vec![0u32; n2];
    for b1 in 0..n1 {
        let k1 = bitrev(b1, m1);
        for c in 0..n2 {
            row[c] = mont_mul_u32(mid[n2 * b1 + c], tw.pre_pass2[c], q, lf);
        }
        butterfly_dif(&mut row, &tw.butterfly_pass2, q, lf);
        for (b2, &v) in row.iter().enumerate() {
            out[n2 * bitrev(k1, m1) + b2] = to_centered(v, q);
        }
    }
    ResiduePoly::from_coeffs(poly.prime, Domain::Evaluation, out)
}

/// Inverse two-pass transform from canonical evaluation order.
pub fn intt_two_pass(poly: &ResiduePoly, tw: &TwoPassTwiddles) -> ResiduePoly {
    assert_eq!(poly.domain, Domain::Evaluation);
    assert_eq!(poly.prime.q, tw.prime.q);
    let (n1, n2) = (tw.n1, tw.n2);
    let n = n1 * n2;
    assert_eq!(poly.n(), n);
    let q = tw.prime.q;
    let lf = tw.prime.low_fixed;
    let m1 = n1.trailing_zeros();

    // Undo pass 2 row by row, leaving the pass-1 output matrix.
    let mut mid = vec![0u32; n];
    let mut row = vec![0u32; n2];
    for b1 in 0..n1 {
        let k1 = bitrev(b1, m1);
        for b2 in 0..n2 {
            row[b2] = to_unsigned(poly.coeffs[n2 * bitrev(k1, m1) + b2], q);
        }
        butterfly_dit(&mut row, &tw.inv_butterfly_pass2, q, lf);
        let factors = power_generator_mont(tw.inv_post_seeds[k1], n2 - 1, &tw.prime);
        for (c, &v) in row.iter().enumerate() {
            let v = mont_mul_u32(v, tw.inv_post_pass2[c], q, lf);
            let v = if c == 0 {
                v
            } else {
                mont_mul_u32(v, factors[c - 1], q, lf)
            };
            mid[n2 * b1 + c] = v;
        }
    }

    // Undo pass 1 column by column.
    let mut out = vec![0i64; n];
    let mut col = vec![0u32; n1];
    for c in 0..n2 {
        for b1 in 0..n1 {
            col[b1] = mid[n2 * b1 + c];
        }
        butterfly_dit(&mut col, &tw.inv_butterfly_pass1, q, lf);
        for (r, &v) in col.iter().enumerate() {
            out[n2 * r + c] = to_centered(mont_mul_u32(v, tw.inv_post_pass1[r], q, lf), q);
        }
    }
    ResiduePoly::from_coeffs(poly.prime, Domain::Coefficient, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntt::{ntt_direct, NttTable};
    use crate::prime::generate_prime_chain;

    fn ramp(prime: crate::prime::NttPrime) -> ResiduePoly {
        let n = prime.n();
        let coeffs = (0..n)
            .map(|i| crate::mont::centered_rem(i as i128 * 31 + 7, prime.q as u64))
            .collect();
        ResiduePoly::from_coeffs(prime, Domain::Coefficient, coeffs)
    }

    #[test]
    fn matches_direct_on_16_point_4x4() {
        let p = generate_prime_chain(4, 13, 1).unwrap()[0];
        let tw = TwoPassTwiddles::new(p, 4).unwrap();
        let table = NttTable::new(p);
        let x = ramp(p);
        assert_eq!(ntt_two_pass(&x, &tw), ntt_direct(&x, &table));
    }

    #[test]
    fn matches_direct_on_16_point_8x2() {
        let p = generate_prime_chain(4, 13, 1).unwrap()[0];
        let tw = TwoPassTwiddles::new(p, 8).unwrap();
        let table = NttTable::new(p);
        let x = ramp(p);
        assert_eq!(ntt_two_pass(&x, &tw), ntt_direct(&x, &table));
    }

    #[test]
    fn roundtrip_large_split() {
        let p = generate_prime_chain(12, 27, 1).unwrap()[0]; // N = 4096 = 64 x 64
        let tw = TwoPassTwiddles::new(p, 64).unwrap();
        let x = ramp(p);
        let back = intt_two_pass(&ntt_two_pass(&x, &tw), &tw);
        assert_eq!(back, x);
    }
}
