//! Plaintext slot packing by binomial factorization.
//!
//! With d the multiplicative order of p mod 2N and l = N/d, the ring
//! polynomial splits as X^N + 1 = prod over odd o < 2l of (X^d - zeta^o)
//! mod p^j whenever an element zeta of order 2l exists, i.e. 2l | p - 1.
//! Each factor contributes one slot Z_{p^j}[X]/(X^d - rho_i).  Encoding
//! interpolates per coefficient group with an l-point Lagrange formula
//! whose denominators are units mod p; decoding is the direct fold
//! content_i[m] = sum_u a[m + u*d] * rho_i^u.  Both cost O(N*l).

use crate::arith::{inv_mod_u64, mul_mod_u64, pow_mod_u64};
use crate::error::BgvError;

#[derive(Debug, Clone)]
pub struct Packing {
    pub n_log: u32,
    pub p: u64,
    pub e_max: u32,
    /// Degree of each irreducible factor.
    pub d: usize,
    /// Slot count.
    pub ell: usize,
    /// Odd exponents labeling the slots, ascending.
    pub exponents: Vec<usize>,
    /// Per precision j (1-indexed): tables mod p^j.
    tables: Vec<PrecisionTable>,
}

#[derive(Debug, Clone)]
struct PrecisionTable {
    modulus: u64,
    /// rho_i = zeta^{exponents[i]} mod p^j.
    roots: Vec<u64>,
    /// Lagrange numerator coefficients: numer[i][u] is the Y^u coefficient
    /// of prod_{j != i} (Y - rho_j), scaled by the inverse denominator.
    scaled_numer: Vec<Vec<u64>>,
}

impl Packing {
    pub fn new(n_log: u32, p: u64, e_max: u32) -> Result<Self, BgvError> {
        let n = 1usize << n_log;
        let two_n = 2 * n as u64;
        // order of p in (Z / 2N)*
        let mut d = 1usize;
        let mut acc = p % two_n;
        while acc != 1 {
            acc = acc * p % two_n;
            d += 1;
        }
        let ell = n / d;
        let two_ell = 2 * ell as u64;
        if (p - 1) % two_ell != 0 {
            return Err(BgvError::PackingUnsupported {
                two_ell,
                p_minus_1: p - 1,
            });
        }
        let exponents: Vec<usize> = (0..ell).map(|i| 2 * i + 1).collect();

        let mut tables = Vec::with_capacity(e_max as usize);
        for j in 1..=e_max {
            let modulus = p.pow(j);
            let zeta = root_of_unity(p, j, two_ell);
            let roots: Vec<u64> = exponents
                .iter()
                .map(|&o| pow_mod_u64(zeta, o as u64, modulus))
                .collect();
            let scaled_numer = lagrange_numerators(&roots, modulus, p)?;
            tables.push(PrecisionTable {
                modulus,
                roots,
                scaled_numer,
            });
        }
        Ok(Packing {
            n_log,
            p,
            e_max,
            d,
            ell,
            exponents,
            tables,
        })
    }

    pub fn n(&self) -> usize {
        1 << self.n_log
    }

    fn table(&self, precision: u32) -> &PrecisionTable {
        assert!(precision >= 1 && precision <= self.e_max);
        &self.tables[precision as usize - 1]
    }

    pub fn modulus(&self, precision: u32) -> u64 {
        self.table(precision).modulus
    }

    pub fn root(&self, slot: usize, precision: u32) -> u64 {
        self.table(precision).roots[slot]
    }

    /// Centered representative helper for this packing's modulus.
    fn center(v: u64, m: u64) -> i64 {
        if 2 * (v as u128) >= m as u128 {
            v as i64 - m as i64
        } else {
            v as i64
        }
    }

    /// Full encode: slot i carries a degree-< d polynomial over Z_{p^j}
    /// (centered coefficients).  Output: centered ring coefficients.
    pub fn encode(&self, slots: &[Vec<i64>], precision: u32) -> Result<Vec<i64>, BgvError> {
        if slots.len() != self.ell {
            return Err(BgvError::SlotCount {
                got: slots.len(),
                expected: self.ell,
            });
        }
        let tab = self.table(precision);
        let m = tab.modulus;
        let n = self.n();
        let mut out = vec![0i64; n];
        for c in 0..self.d {
            for (i, content) in slots.iter().enumerate() {
                let v = content.get(c).copied().unwrap_or(0).rem_euclid(m as i64) as u64;
                if v == 0 {
                    continue;
                }
                for (u, &num) in tab.scaled_numer[i].iter().enumerate() {
                    let idx = c + u * self.d;
                    let cur = out[idx].rem_euclid(m as i64) as u64;
                    out[idx] = ((cur + mul_mod_u64(v, num, m)) % m) as i64;
                }
            }
        }
        for v in out.iter_mut() {
            *v = Self::center(v.rem_euclid(m as i64) as u64, m);
        }
        Ok(out)
    }

    /// Full decode into per-slot contents.
    pub fn decode(&self, coeffs: &[i64], precision: u32) -> Vec<Vec<i64>> {
        assert_eq!(coeffs.len(), self.n());
        let tab = self.table(precision);
        let m = tab.modulus;
        (0..self.ell)
            .map(|i| {
                let rho = tab.roots[i];
                (0..self.d)
                    .map(|c| {
                        let mut acc = 0u64;
                        let mut rho_pow = 1u64;
                        for u in 0..self.ell {
                            let a = coeffs[c + u * self.d].rem_euclid(m as i64) as u64;
                            acc = (acc + mul_mod_u64(a, rho_pow, m)) % m;
                            rho_pow = mul_mod_u64(rho_pow, rho, m);
                        }
                        Self::center(acc, m)
                    })
                    .collect()
            })
            .collect()
    }

    /// Encode scalar-per-slot values (thin plaintexts).
    pub fn thin_encode(&self, values: &[i64], precision: u32) -> Result<Vec<i64>, BgvError> {
        let slots: Vec<Vec<i64>> = values.iter().map(|&v| vec![v]).collect();
        self.encode(&slots, precision)
    }

    /// Decode assuming the element is thin; returns the slot constants.
    pub fn thin_decode(&self, coeffs: &[i64], precision: u32) -> Vec<i64> {
        self.decode(coeffs, precision)
            .into_iter()
            .map(|content| content[0])
            .collect()
    }

    /// True when every slot holds a constant.
    pub fn is_thin(&self, coeffs: &[i64], precision: u32) -> bool {
        self.decode(coeffs, precision)
            .iter()
            .all(|content| content[1..].iter().all(|&c| c == 0))
    }

    /// Slot permutation under X -> X^k for thin elements:
    /// thin_decode(phi_k(x))[i] = thin_decode(x)[perm[i]].
    pub fn slot_perm(&self, k: usize) -> Result<Vec<usize>, BgvError> {
        if k % 2 == 0 {
            return Err(BgvError::Ring(rns_ring::RingError::InvalidAutomorphism { k }));
        }
        let two_ell = 2 * self.ell;
        Ok(self
            .exponents
            .iter()
            .map(|&o| {
                let target = (o * k) % two_ell;
                self.exponents
                    .iter()
                    .position(|&e| e == target)
                    .expect("odd * odd stays odd")
            })
            .collect())
    }
}

/// Lagrange numerators N_i(Y) = prod_{j != i} (Y - rho_j) scaled by
/// (prod_{j != i} (rho_i - rho_j))^(-1), coefficients mod m.
fn lagrange_numerators(roots: &[u64], m: u64, p: u64) -> Result<Vec<Vec<u64>>, BgvError> {
    let ell = roots.len();
    // full product F(Y) = prod (Y - rho_j)
    let mut full = vec![0u64; ell + 1];
    full[0] = 1;
    let mut deg = 0;
    for &r in roots {
        let neg_r = (m - r % m) % m;
        let mut next = vec![0u64; ell + 1];
        for idx in 0..=deg {
            next[idx + 1] = (next[idx + 1] + full[idx]) % m;
            next[idx] = (next[idx] + mul_mod_u64(full[idx], neg_r, m)) % m;
        }
        full = next;
        deg += 1;
    }

    let mut out = Vec::with_capacity(ell);
    for (i, &ri) in roots.iter().enumerate() {
        // synthetic division of F by (Y - rho_i)
        let mut numer = vec![0u64; ell];
        let mut carry = 0u64;
        for idx in (0..ell).rev() {
            carry = (full[idx + 1] + mul_mod_u64(carry, ri, m)) % m;
            numer[idx] = carry;
        }
        // denominator prod_{j != i} (rho_i - rho_j)
        let mut den = 1u64;
        for (j, &rj) in roots.iter().enumerate() {
            if j != i {
                den = mul_mod_u64(den, (m + ri - rj % m) % m, m);
            }
        }
        if den % p == 0 {
            return Err(BgvError::NotAUnit {
                value: den,
                modulus: m,
            });
        }
        let den_inv = inv_mod_u64(den, m).ok_or(BgvError::NotAUnit {
            value: den,
            modulus: m,
        })?;
        for c in numer.iter_mut() {
            *c = mul_mod_u64(*c, den_inv, m);
        }
        out.push(numer);
    }
    Ok(out)
}

/// An element of order `order` in (Z/p^e)*, via a primitive root.
fn root_of_unity(p: u64, e: u32, order: u64) -> u64 {
    let m = p.pow(e);
    let phi = p.pow(e - 1) * (p - 1);
    assert_eq!(phi % order, 0);
    let g = primitive_root(p, e);
    let zeta = pow_mod_u64(g, phi / order, m);
    assert_eq!(pow_mod_u64(zeta, order, m), 1);
    if order > 1 {
        assert_ne!(pow_mod_u64(zeta, order / 2, m), 1);
    }
    zeta
}

fn primitive_root(p: u64, e: u32) -> u64 {
    let factors = prime_factors(p - 1);
    let mut g = 2u64;
    loop {
        let ok = factors
            .iter()
            .all(|&f| pow_mod_u64(g, (p - 1) / f, p) != 1);
        if ok {
            break;
        }
        g += 1;
    }
    if e == 1 {
        return g;
    }
    // lift to p^e: g stays primitive unless g^(p-1) = 1 mod p^2
    if pow_mod_u64(g, p - 1, p * p) == 1 {
        g += p;
    }
    g
}

fn prime_factors(mut v: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= v {
        if v % f == 0 {
            out.push(f);
            while v % f == 0 {
                v /= f;
            }
        }
        f += 1;
    }
    if v > 1 {
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn negacyclic_mul_mod(a: &[i64], b: &[i64], m: u64) -> Vec<i64> {
        let n = a.len();
        let mut acc = vec![0i128; n];
        for i in 0..n {
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
        acc.into_iter()
            .map(|v| rns_ring::mont::centered_rem(v, m))
            .collect()
    }

    #[test]
    fn fully_split_roundtrip() {
        // N = 16, p = 97: d = 1, l = 16
        let pk = Packing::new(4, 97, 1).unwrap();
        assert_eq!(pk.d, 1);
        assert_eq!(pk.ell, 16);
        let vals: Vec<i64> = (0..16).map(|i| (i as i64 * 7 - 40) % 48).collect();
        let coeffs = pk.thin_encode(&vals, 1).unwrap();
        assert_eq!(pk.thin_decode(&coeffs, 1), vals);
        assert!(pk.is_thin(&coeffs, 1));
    }

    #[test]
    fn two_slot_prime_power_roundtrip() {
        // N = 8, p = 5: ord_16(5) = 4, d = 4, l = 2; supported since 4 | 4
        let pk = Packing::new(3, 5, 3).unwrap();
        assert_eq!(pk.d, 4);
        assert_eq!(pk.ell, 2);
        for precision in 1..=3 {
            let m = pk.modulus(precision) as i64;
            let slots = vec![
                vec![1, -2, 0, m / 2 - 1],
                vec![-m / 2, 3, -1, 2],
            ];
            let expect: Vec<Vec<i64>> = slots
                .iter()
                .map(|s| {
                    s.iter()
                        .map(|&v| rns_ring::mont::centered_rem(v as i128, m as u64))
                        .collect()
                })
                .collect();
            let coeffs = pk.encode(&slots, precision).unwrap();
            assert_eq!(pk.decode(&coeffs, precision), expect);
        }
    }

    #[test]
    fn product_structure_is_slotwise() {
        let pk = Packing::new(4, 97, 1).unwrap();
        let a: Vec<i64> = (0..16).map(|i| (i as i64 * 5) % 40 - 20).collect();
        let b: Vec<i64> = (0..16).map(|i| (i as i64 * 11) % 30 - 15).collect();
        let ca = pk.thin_encode(&a, 1).unwrap();
        let cb = pk.thin_encode(&b, 1).unwrap();
        let prod = negacyclic_mul_mod(&ca, &cb, 97);
        let expect: Vec<i64> = a
            .iter()
            .zip(&b)
            .map(|(&x, &y)| rns_ring::mont::centered_rem(x as i128 * y as i128, 97))
            .collect();
        assert_eq!(pk.thin_decode(&prod, 1), expect);
    }

    #[test]
    fn automorphism_permutes_thin_slots() {
        let pk = Packing::new(4, 97, 1).unwrap();
        let vals: Vec<i64> = (0..16).map(|i| i as i64 - 8).collect();
        let coeffs = pk.thin_encode(&vals, 1).unwrap();
        for k in [3usize, 5, 9, 15, 31] {
            // apply X -> X^k directly on integer coefficients
            let n = 16;
            let mut rotated = vec![0i64; n];
            for (i, &c) in coeffs.iter().enumerate() {
                let e = (i * k) % (2 * n);
                let v = if e >= n { -c } else { c };
                rotated[e % n] = rns_ring::mont::centered_rem(v as i128, 97);
            }
            let perm = pk.slot_perm(k).unwrap();
            let got = pk.thin_decode(&rotated, 1);
            let expect: Vec<i64> = perm.iter().map(|&s| vals[s]).collect();
            assert_eq!(got, expect, "k = {k}");
        }
    }

    #[test]
    fn unsupported_packing_reports() {
        // N = 4096, p = 3: d = 2048 = N/2, l = 2, need 4 | p - 1 = 2
        assert!(matches!(
            Packing::new(12, 3, 1),
            Err(BgvError::PackingUnsupported { .. })
        ));
    }

    #[test]
    fn eight_slot_packing_at_241() {
        let pk = Packing::new(4, 241, 1).unwrap();
        assert_eq!(pk.d, 2);
        assert_eq!(pk.ell, 8);
        let slots: Vec<Vec<i64>> = (0..8).map(|i| vec![i as i64 * 3 - 12, -i as i64]).collect();
        let coeffs = pk.encode(&slots, 1).unwrap();
        assert_eq!(pk.decode(&coeffs, 1), slots);
    }
}
