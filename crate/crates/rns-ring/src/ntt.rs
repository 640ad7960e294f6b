//! Negacyclic number-theoretic transform, direct radix-2 form.
//!
//! Forward: premultiply coefficient i by psi^i, then run a
//! decimation-in-frequency transform with omega = psi^2.  The output stays
//! in bit-reversed order; position p holds the evaluation of the input at
//! psi^(2 * bitrev(p) + 1).  That ordering is this crate's canonical
//! evaluation layout.
//!
//! Inverse: decimation-in-time with omega^(-1) consuming bit-reversed
//! input, then per-coefficient multiplication by N^(-1) * psi^(-i) (one
//! fused table).
//!
//! Working values are standard-form u32 in [0, q); twiddle tables are in
//! Montgomery form so each butterfly costs one `mont_reduce`.

use crate::mont::{mont_reduce, to_centered, to_unsigned};
use crate::poly::{Domain, ResiduePoly};
use crate::prime::NttPrime;

/// Precomputed tables for one prime at its ring degree.
#[derive(Debug, Clone)]
pub struct NttTable {
    pub prime: NttPrime,
    /// psi^i in Montgomery form, i in 0..N.
    psi_mont: Vec<u32>,
    /// omega^e in Montgomery form, e in 0..N/2, omega = psi^2.
    omega_mont: Vec<u32>,
    /// omega^(-e) in Montgomery form, e in 0..N/2.
    omega_inv_mont: Vec<u32>,
    /// N^(-1) * psi^(-i) in Montgomery form, i in 0..N.
    psi_inv_n_inv_mont: Vec<u32>,
}

impl NttTable {
    pub fn new(prime: NttPrime) -> Self {
        let n = prime.n();
        let q = prime.q;
        let mut psi_mont = Vec::with_capacity(n);
        let mut psi_inv_n_inv_mont = Vec::with_capacity(n);
        let mut cur = 1u32;
        let mut cur_inv = prime.n_inv;
        for _ in 0..n {
            psi_mont.push(prime.to_mont(cur));
            psi_inv_n_inv_mont.push(prime.to_mont(cur_inv));
            cur = crate::mont::mul_mod_u32(cur, prime.psi, q);
            cur_inv = crate::mont::mul_mod_u32(cur_inv, prime.psi_inv, q);
        }
        let omega = crate::mont::mul_mod_u32(prime.psi, prime.psi, q);
        let omega_inv = crate::mont::mul_mod_u32(prime.psi_inv, prime.psi_inv, q);
        let mut omega_mont = Vec::with_capacity(n / 2);
        let mut omega_inv_mont = Vec::with_capacity(n / 2);
        let mut cur = 1u32;
        let mut cur_inv = 1u32;
        for _ in 0..n / 2 {
            omega_mont.push(prime.to_mont(cur));
            omega_inv_mont.push(prime.to_mont(cur_inv));
            cur = crate::mont::mul_mod_u32(cur, omega, q);
            cur_inv = crate::mont::mul_mod_u32(cur_inv, omega_inv, q);
        }
        NttTable {
            prime,
            psi_mont,
            omega_mont,
            omega_inv_mont,
            psi_inv_n_inv_mont,
        }
    }

    #[inline]
    fn mul_tw(&self, x: u32, tw_mont: u32) -> u32 {
        mont_reduce(x as u64 * tw_mont as u64, self.prime.q, self.prime.low_fixed)
    }
}

/// In-place DIF passes on standard-form values: natural input, bit-reversed
/// output.  `omega_mont[e]` must hold omega^e for e in 0..n/2 where omega
/// has order n.
pub fn dif_forward(x: &mut [u32], omega_mont: &[u32], table: &NttTable) {
    let n = x.len();
    debug_assert!(n.is_power_of_two());
    let q = table.prime.q as u64;
    let mut half = n / 2;
    while half >= 1 {
        let stride = n / (2 * half);
        for block in 0..stride {
            let base = block * 2 * half;
            for j in 0..half {
                let tw = omega_mont[j * stride];
                let a = x[base + j] as u64;
                let b = x[base + j + half] as u64;
                let sum = a + b;
                let sum = if sum >= q { sum - q } else { sum };
                let diff = a + q - b;
                let diff = if diff >= q { diff - q } else { diff };
                x[base + j] = sum as u32;
                x[base + j + half] = table.mul_tw(diff as u32, tw);
            }
        }
        half /= 2;
    }
}

/// In-place DIT passes: bit-reversed input, natural output.
pub fn dit_inverse(x: &mut [u32], omega_inv_mont: &[u32], table: &NttTable) {
    let n = x.len();
    debug_assert!(n.is_power_of_two());
    let q = table.prime.q as u64;
    let mut half = 1;
    while half <= n / 2 {
        let stride = n / (2 * half);
        for block in 0..stride {
            let base = block * 2 * half;
            for j in 0..half {
                let tw = omega_inv_mont[j * stride];
                let a = x[base + j] as u64;
                let b = table.mul_tw(x[base + j + half], tw) as u64;
                let sum = a + b;
                let sum = if sum >= q { sum - q } else { sum };
                let diff = a + q - b;
                let diff = if diff >= q { diff - q } else { diff };
                x[base + j] = sum as u32;
                x[base + j + half] = diff as u32;
            }
        }
        half *= 2;
    }
}

/// Forward transform of one residue into canonical evaluation order.
pub fn ntt_direct(poly: &ResiduePoly, table: &NttTable) -> ResiduePoly {
    assert_eq!(poly.domain, Domain::Coefficient);
    assert_eq!(poly.prime.q, table.prime.q);
    let q = table.prime.q;
    let mut x: Vec<u32> = poly
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| table.mul_tw(to_unsigned(c, q), table.psi_mont[i]))
        .collect();
    dif_forward(&mut x, &table.omega_mont, table);
    ResiduePoly::from_coeffs(
        poly.prime,
        Domain::Evaluation,
        x.into_iter().map(|v| to_centered(v, q)).collect(),
    )
}

/// Inverse transform from canonical evaluation order back to coefficients.
pub fn intt_direct(poly: &ResiduePoly, table: &NttTable) -> ResiduePoly {
    assert_eq!(poly.domain, Domain::Evaluation);
    assert_eq!(poly.prime.q, table.prime.q);
    let q = table.prime.q;
    let mut x: Vec<u32> = poly.coeffs.iter().map(|&c| to_unsigned(c, q)).collect();
    dit_inverse(&mut x, &table.omega_inv_mont, table);
    let coeffs = x
        .into_iter()
        .enumerate()
        .map(|(i, v)| to_centered(table.mul_tw(v, table.psi_inv_n_inv_mont[i]), q))
        .collect();
    ResiduePoly::from_coeffs(poly.prime, Domain::Coefficient, coeffs)
}
