//! Twiddle factor preparation for the two-pass transform, plus the layered
//! power generator used to synthesize per-chunk factor sequences on the fly.

use crate::error::RingError;
use crate::mont::{mont_mul_u32, mul_mod_u32, pow_mod};
use crate::prime::NttPrime;

/// Successive powers seed^1 .. seed^count mod q, built by layer doubling:
/// once seed^1..seed^k are known, seed^(k+i) = seed^k * seed^i extends the
/// run.  Costs exactly count - 1 multiplications.
pub fn power_generator(seed: u32, count: usize, q: u32) -> Vec<u32> {
    let mut v = Vec::with_capacity(count);
    if count == 0 {
        return v;
    }
    v.push(seed % q);
    while v.len() < count {
        let k = v.len();
        let anchor = v[k - 1];
        for i in 0..k.min(count - k) {
            v.push(mul_mod_u32(anchor, v[i], q));
        }
    }
    v
}

/// Same layering on Montgomery-form values (the product of two
/// Montgomery-form factors, reduced once, is again in Montgomery form).
pub fn power_generator_mont(seed_mont: u32, count: usize, prime: &NttPrime) -> Vec<u32> {
    let mut v = Vec::with_capacity(count);
    if count == 0 {
        return v;
    }
    v.push(seed_mont);
    while v.len() < count {
        let k = v.len();
        let anchor = v[k - 1];
        for i in 0..k.min(count - k) {
            v.push(mont_mul_u32(anchor, v[i], prime.q, prime.low_fixed));
        }
    }
    v
}

/// Twiddle tables for one prime and one N1 x N2 split of its ring degree.
/// All tables are in Montgomery form.
///
/// Pass 1 is an N1-point negacyclic transform per column: premultiply by
/// phi^n1 (phi = psi^N2), butterfly with phi^2, then scale slot b1 by
/// (omega_N^n2)^bitrev(b1) where omega_N = psi^2.  Pass 2 is an N2-point
/// cyclic transform per row: premultiply by psi^n2, butterfly with
/// Omega = psi^(2*N1).  The inverse runs the mirror image with inverted
/// constants and the scale factors N1^(-1), N2^(-1) folded into the
/// post-multiplication tables.
#[derive(Debug, Clone)]
pub struct TwoPassTwiddles {
    pub prime: NttPrime,
    pub n1: usize,
    pub n2: usize,
    /// phi^n1, n1 in 0..N1.
    pub pre_pass1: Vec<u32>,
    /// (phi^2)^e, e in 0..N1/2.
    pub butterfly_pass1: Vec<u32>,
    /// omega_N^n2, n2 in 0..N2: seeds for the pass-1 post factors.
    pub post_seeds: Vec<u32>,
    /// psi^n2, n2 in 0..N2.
    pub pre_pass2: Vec<u32>,
    /// Omega^e, e in 0..N2/2.
    pub butterfly_pass2: Vec<u32>,
    /// Omega^(-e), e in 0..N2/2.
    pub inv_butterfly_pass2: Vec<u32>,
    /// N2^(-1) * psi^(-n2), n2 in 0..N2.
    pub inv_post_pass2: Vec<u32>,
    /// omega_N^(-k1), k1 in 0..N1: seeds for the inverse per-chunk factors.
    pub inv_post_seeds: Vec<u32>,
    /// (phi^2)^(-e), e in 0..N1/2.
    pub inv_butterfly_pass1: Vec<u32>,
    /// N1^(-1) * phi^(-n1), n1 in 0..N1.
    pub inv_post_pass1: Vec<u32>,
}

impl TwoPassTwiddles {
    /// `radix` is the largest supported pass size; the split must be
    /// N = N1 * N2 with N1 = radix and N2 a power of two no larger than N1.
    pub fn new(prime: NttPrime, radix: usize) -> Result<Self, RingError> {
        let n = prime.n();
        let n1 = radix;
        if !n1.is_power_of_two() || n % n1 != 0 {
            return Err(RingError::UnsupportedShape { n, radix });
        }
        let n2 = n / n1;
        if !n2.is_power_of_two() || n2 > n1 || n2 < 2 {
            return Err(RingError::UnsupportedShape { n, radix });
        }
        let q = prime.q;
        let psi = prime.psi;
        let psi_inv = prime.psi_inv;
        let phi = pow_mod(psi, n2 as u64, q);
        let phi_inv = pow_mod(psi_inv, n2 as u64, q);
        let omega_n = mul_mod_u32(psi, psi, q);
        let omega_n_inv = mul_mod_u32(psi_inv, psi_inv, q);
        let big_omega = pow_mod(psi, 2 * n1 as u64, q);
        let big_omega_inv = pow_mod(psi_inv, 2 * n1 as u64, q);
        let n1_inv = crate::mont::inv_mod(n1 as u32 % q, q);
        let n2_inv = crate::mont::inv_mod(n2 as u32 % q, q);

        let powers = |base: u32, count: usize, scale: u32| -> Vec<u32> {
            let mut out = Vec::with_capacity(count);
            let mut cur = scale;
            for _ in 0..count {
                out.push(prime.to_mont(cur));
                cur = mul_mod_u32(cur, base, q);
            }
            out
        };

        Ok(TwoPassTwiddles {
            prime,
            n1,
            n2,
            pre_pass1: powers(phi, n1, 1),
            butterfly_pass1: powers(mul_mod_u32(phi, phi, q), n1 / 2, 1),
            post_seeds: powers(omega_n, n2, 1),
            pre_pass2: powers(psi, n2, 1),
            butterfly_pass2: powers(big_omega, n2 / 2, 1),
            inv_butterfly_pass2: powers(big_omega_inv, n2 / 2, 1),
            inv_post_pass2: powers(psi_inv, n2, n2_inv),
            inv_post_seeds: powers(omega_n_inv, n1, 1),
            inv_butterfly_pass1: powers(mul_mod_u32(phi_inv, phi_inv, q), n1 / 2, 1),
            inv_post_pass1: powers(phi_inv, n1, n1_inv),
        })
    }
}
