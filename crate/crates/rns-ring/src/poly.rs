//! Polynomials in Z_q[X] / (X^N + 1), singly and in RNS form.
//!
//! Coefficients are stored as symmetric representatives in [-q/2, q/2).
//! Evaluation-domain vectors use the canonical transform order: position p
//! holds the evaluation at psi^(2 * bitrev(p) + 1), which is what the
//! radix-2 decimation-in-frequency transform produces without any final
//! reordering and what the two-pass transform produces for every supported
//! split.

use crate::error::RingError;
use crate::mont::{add_centered, centered_rem, mul_mod_u32, to_centered, to_unsigned};
use crate::prime::NttPrime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Coefficient,
    Evaluation,
}

/// One residue of an RNS polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResiduePoly {
    pub prime: NttPrime,
    pub domain: Domain,
    pub coeffs: Vec<i64>,
}

impl ResiduePoly {
    pub fn zero(prime: NttPrime, domain: Domain) -> Self {
        ResiduePoly {
            prime,
            domain,
            coeffs: vec![0; prime.n()],
        }
    }

    pub fn from_coeffs(prime: NttPrime, domain: Domain, coeffs: Vec<i64>) -> Self {
        assert_eq!(coeffs.len(), prime.n());
        ResiduePoly { prime, domain, coeffs }
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    fn check_compatible(&self, other: &Self) -> Result<(), RingError> {
        if self.prime.q != other.prime.q {
            return Err(RingError::ModulusMismatch {
                left: self.prime.q as u64,
                right: other.prime.q as u64,
            });
        }
        if self.n() != other.n() {
            return Err(RingError::DegreeMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        if self.domain != other.domain {
            return Err(RingError::DomainMismatch {
                expected: self.domain,
                found: other.domain,
            });
        }
        Ok(())
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<(), RingError> {
        self.check_compatible(other)?;
        let q = self.prime.q;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = add_centered(*a, *b, q);
        }
        Ok(())
    }

    pub fn sub_assign(&mut self, other: &Self) -> Result<(), RingError> {
        self.check_compatible(other)?;
        let q = self.prime.q;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = add_centered(*a, -*b, q);
        }
        Ok(())
    }

    pub fn negate(&mut self) {
        let q = self.prime.q as i64;
        for a in self.coeffs.iter_mut() {
            // -(-q/2) stays -q/2 under the half-open convention
            if 2 * -*a >= q {
                *a = -*a - q;
            } else {
                *a = -*a;
            }
        }
    }

    /// Pointwise product; both operands must be in the evaluation domain.
    pub fn pointwise_mul_assign(&mut self, other: &Self) -> Result<(), RingError> {
        self.check_compatible(other)?;
        if self.domain != Domain::Evaluation {
            return Err(RingError::DomainMismatch {
                expected: Domain::Evaluation,
                found: self.domain,
            });
        }
        let q = self.prime.q;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            let prod = mul_mod_u32(to_unsigned(*a, q), to_unsigned(*b, q), q);
            *a = to_centered(prod, q);
        }
        Ok(())
    }

    /// Multiply every entry by a scalar (given as an arbitrary integer,
    /// reduced into this residue's modulus).
    pub fn scalar_mul_assign(&mut self, scalar: i64) {
        let q = self.prime.q;
        let s = to_unsigned(centered_rem(scalar as i128, q as u64), q);
        for a in self.coeffs.iter_mut() {
            let prod = mul_mod_u32(to_unsigned(*a, q), s, q);
            *a = to_centered(prod, q);
        }
    }

    /// X -> X^k in the coefficient domain: out[i*k mod N] = +/- in[i], with
    /// the sign flipped when i*k mod 2N lands in [N, 2N).
    pub fn automorphism_coeff(&self, k: usize) -> Result<Self, RingError> {
        if self.domain != Domain::Coefficient {
            return Err(RingError::DomainMismatch {
                expected: Domain::Coefficient,
                found: self.domain,
            });
        }
        if k % 2 == 0 {
            return Err(RingError::InvalidAutomorphism { k });
        }
        let n = self.n();
        let q = self.prime.q as i64;
        let mut out = vec![0i64; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            let e = (i * k) % (2 * n);
            let mut v = c;
            if e >= n {
                if 2 * -v >= q {
                    v = -v - q;
                } else {
                    v = -v;
                }
            }
            out[e % n] = v;
        }
        Ok(ResiduePoly::from_coeffs(self.prime, Domain::Coefficient, out))
    }

    /// X -> X^k applied directly in the canonical evaluation order:
    /// out[p] = in[bitrev((k * bitrev(p) + (k-1)/2) mod N)].
    pub fn automorphism_eval(&self, k: usize) -> Result<Self, RingError> {
        if self.domain != Domain::Evaluation {
            return Err(RingError::DomainMismatch {
                expected: Domain::Evaluation,
                found: self.domain,
            });
        }
        if k % 2 == 0 {
            return Err(RingError::InvalidAutomorphism { k });
        }
        let n = self.n();
        let n_log = self.prime.n_log;
        let delta = (k - 1) / 2;
        let mut out = vec![0i64; n];
        for (p, slot) in out.iter_mut().enumerate() {
            let j = bitrev(p, n_log);
            let src = bitrev((k * j + delta) % n, n_log);
            *slot = self.coeffs[src];
        }
        Ok(ResiduePoly::from_coeffs(self.prime, Domain::Evaluation, out))
    }
}

/// Reverse the low `bits` bits of x.
#[inline]
pub fn bitrev(x: usize, bits: u32) -> usize {
    if bits == 0 {
        return 0;
    }
    x.reverse_bits() >> (usize::BITS - bits)
}

/// An RNS polynomial: the same element viewed modulo each prime of a basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RnsPoly {
    pub residues: Vec<ResiduePoly>,
}

impl RnsPoly {
    pub fn zero(primes: &[NttPrime], domain: Domain) -> Self {
        RnsPoly {
            residues: primes.iter().map(|&p| ResiduePoly::zero(p, domain)).collect(),
        }
    }

    /// Reduce integer coefficients into every residue of the basis.
    pub fn from_int_coeffs(primes: &[NttPrime], coeffs: &[i64]) -> Self {
        let residues = primes
            .iter()
            .map(|&p| {
                let v = coeffs
                    .iter()
                    .map(|&c| centered_rem(c as i128, p.q as u64))
                    .collect();
                ResiduePoly::from_coeffs(p, Domain::Coefficient, v)
            })
            .collect();
        RnsPoly { residues }
    }

    pub fn n(&self) -> usize {
        self.residues.first().map_or(0, |r| r.n())
    }

    pub fn domain(&self) -> Domain {
        self.residues.first().map_or(Domain::Coefficient, |r| r.domain)
    }

    pub fn primes(&self) -> Vec<NttPrime> {
        self.residues.iter().map(|r| r.prime).collect()
    }

    pub fn moduli(&self) -> Vec<u32> {
        self.residues.iter().map(|r| r.prime.q).collect()
    }

    pub fn residue_for(&self, q: u32) -> Option<&ResiduePoly> {
        self.residues.iter().find(|r| r.prime.q == q)
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<(), RingError> {
        assert_eq!(self.residues.len(), other.residues.len());
        for (a, b) in self.residues.iter_mut().zip(&other.residues) {
            a.add_assign(b)?;
        }
        Ok(())
    }

    pub fn sub_assign(&mut self, other: &Self) -> Result<(), RingError> {
        assert_eq!(self.residues.len(), other.residues.len());
        for (a, b) in self.residues.iter_mut().zip(&other.residues) {
            a.sub_assign(b)?;
        }
        Ok(())
    }

    pub fn negate(&mut self) {
        for r in self.residues.iter_mut() {
            r.negate();
        }
    }

    pub fn pointwise_mul_assign(&mut self, other: &Self) -> Result<(), RingError> {
        assert_eq!(self.residues.len(), other.residues.len());
        for (a, b) in self.residues.iter_mut().zip(&other.residues) {
            a.pointwise_mul_assign(b)?;
        }
        Ok(())
    }

    pub fn scalar_mul_assign(&mut self, scalar: i64) {
        for r in self.residues.iter_mut() {
            r.scalar_mul_assign(scalar);
        }
    }

    /// Multiply by a scalar given per-residue (for constants that do not fit
    /// in one machine word, pre-reduced by the caller).
    pub fn scalar_mul_rns_assign(&mut self, per_residue: &[i64]) {
        assert_eq!(self.residues.len(), per_residue.len());
        for (r, &s) in self.residues.iter_mut().zip(per_residue) {
            r.scalar_mul_assign(s);
        }
    }

    pub fn automorphism(&self, k: usize) -> Result<Self, RingError> {
        let residues = self
            .residues
            .iter()
            .map(|r| match r.domain {
                Domain::Coefficient => r.automorphism_coeff(k),
                Domain::Evaluation => r.automorphism_eval(k),
            })
            .collect::<Result<_, _>>()?;
        Ok(RnsPoly { residues })
    }

    /// Drop the residue for modulus q, returning it.
    pub fn drop_residue(&mut self, q: u32) -> Option<ResiduePoly> {
        let idx = self.residues.iter().position(|r| r.prime.q == q)?;
        Some(self.residues.remove(idx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prime::generate_prime_chain;

    fn prime_97() -> NttPrime {
        generate_prime_chain(3, 7, 2).unwrap()[1]
    }

    #[test]
    fn add_sub_roundtrip() {
        let p = prime_97();
        let a = ResiduePoly::from_coeffs(p, Domain::Coefficient, vec![1, -2, 3, -4, 5, -6, 7, -8]);
        let b = ResiduePoly::from_coeffs(p, Domain::Coefficient, vec![48, -48, 10, 0, 0, 0, 0, 1]);
        let mut c = a.clone();
        c.add_assign(&b).unwrap();
        c.sub_assign(&b).unwrap();
        assert_eq!(c, a);
    }

    #[test]
    fn negate_keeps_symmetric_range() {
        let p = prime_97();
        let mut a = ResiduePoly::from_coeffs(p, Domain::Coefficient, vec![-48, 48, 0, 1, -1, 2, -2, 3]);
        a.negate();
        assert_eq!(a.coeffs, vec![48, -48, 0, -1, 1, -2, 2, -3]);
    }

    #[test]
    fn automorphism_coeff_matches_sign_rule() {
        let p = prime_97();
        // x = X: under X -> X^k the image is X^k, negated once k wraps past N.
        for k in [1usize, 3, 5, 7, 9, 15] {
            let mut coeffs = vec![0i64; 8];
            coeffs[1] = 1;
            let x = ResiduePoly::from_coeffs(p, Domain::Coefficient, coeffs);
            let y = x.automorphism_coeff(k).unwrap();
            let mut expect = vec![0i64; 8];
            expect[k % 8] = if (k % 16) >= 8 { -1 } else { 1 };
            assert_eq!(y.coeffs, expect, "k = {k}");
        }
    }

    #[test]
    fn even_automorphism_rejected() {
        let p = prime_97();
        let a = ResiduePoly::zero(p, Domain::Coefficient);
        assert_eq!(
            a.automorphism_coeff(2).unwrap_err(),
            RingError::InvalidAutomorphism { k: 2 }
        );
    }

    #[test]
    fn automorphism_composes() {
        let p = prime_97();
        let a = ResiduePoly::from_coeffs(p, Domain::Coefficient, vec![5, -3, 2, 7, -48, 11, 0, 1]);
        let b = a.automorphism_coeff(3).unwrap().automorphism_coeff(5).unwrap();
        let c = a.automorphism_coeff(15).unwrap();
        assert_eq!(b, c);
    }

    #[test]
    fn bitrev_basics() {
        assert_eq!(bitrev(0b001, 3), 0b100);
        assert_eq!(bitrev(0b110, 3), 0b011);
        assert_eq!(bitrev(5, 0), 0);
    }
}
