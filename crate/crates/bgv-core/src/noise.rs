//! Static worst-case noise tracking in the log domain.
//!
//! Tracks log2 of a bound on the noise infinity norm (phi = kappa*m + t*e;
//! the bound is on |e|).  Deliberately pessimistic: polynomial products use
//! the full expansion factor N.  Schedulers use it to decide when to drop
//! primes or trigger recryption; correctness never depends on it.

use crate::params::BgvContext;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseBound {
    /// log2 of the noise bound.
    pub bits: f64,
}

#[derive(Debug, Clone)]
pub struct NoiseModel {
    pub log_n: f64,
    pub log_t: f64,
    /// l1 bound of the secret.
    pub log_s1: f64,
    /// Hard bound of one error sample (rejection cutoff).
    pub log_b: f64,
    pub prime_bits: f64,
    pub log_p_ext: f64,
    pub digit_bits: f64,
    pub digit_count_max: usize,
}

fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (1.0 + 2f64.powf(lo - hi)).log2()
}

impl NoiseModel {
    pub fn new(ctx: &BgvContext) -> Self {
        let p = &ctx.params;
        let s1 = p.secret_weight.unwrap_or(p.n()) as f64;
        NoiseModel {
            log_n: (p.n() as f64).log2(),
            log_t: (p.plain_modulus as f64).log2(),
            log_s1: s1.log2(),
            log_b: (6.0 * p.sigma).ceil().log2(),
            prime_bits: p.prime_bits as f64,
            log_p_ext: ctx
                .chain
                .p_primes
                .iter()
                .map(|q| (q.q as f64).log2())
                .sum(),
            digit_bits: p.digit_width as f64 * p.prime_bits as f64,
            digit_count_max: p.count_q.div_ceil(p.digit_width),
        }
    }

    pub fn fresh(&self) -> NoiseBound {
        NoiseBound {
            bits: self.log_b + log2_add(self.log_n + 1.0, self.log_s1) + 1.0,
        }
    }

    pub fn after_add(&self, a: NoiseBound, b: NoiseBound) -> NoiseBound {
        NoiseBound {
            bits: log2_add(a.bits, b.bits),
        }
    }

    pub fn after_scalar_mul(&self, a: NoiseBound, scalar_bits: f64) -> NoiseBound {
        NoiseBound {
            bits: a.bits + scalar_bits,
        }
    }

    /// Plain multiply by a polynomial with l1 norm 2^l1_bits.
    pub fn after_plain_mul(&self, a: NoiseBound, l1_bits: f64) -> NoiseBound {
        NoiseBound {
            bits: a.bits + l1_bits,
        }
    }

    pub fn after_mul(&self, a: NoiseBound, b: NoiseBound) -> NoiseBound {
        // kappa*m cross terms plus t*e1*e2 plus the plaintext wrap carry
        let cross1 = self.log_n + self.log_t - 1.0 + a.bits;
        let cross2 = self.log_n + self.log_t - 1.0 + b.bits;
        let quad = self.log_n + self.log_t + a.bits + b.bits;
        let carry = self.log_n + self.log_t - 2.0;
        NoiseBound {
            bits: log2_add(log2_add(cross1, cross2), log2_add(quad, carry)),
        }
    }

    /// Additive key-switch noise at a given level.
    pub fn ksw_increment(&self, level: usize) -> NoiseBound {
        let digits = (level as f64 / (self.digit_bits / self.prime_bits)).ceil().max(1.0);
        let inner = self.log_t
            + self.log_n
            + self.log_b
            + self.digit_bits
            + digits.log2()
            - self.log_p_ext;
        let rounding = self.log_t + log2_add(self.log_s1, 0.0) + 2.0;
        NoiseBound {
            bits: log2_add(inner, rounding),
        }
    }

    pub fn after_ksw(&self, a: NoiseBound, level: usize) -> NoiseBound {
        self.after_add(a, self.ksw_increment(level))
    }

    pub fn after_mod_switch(&self, a: NoiseBound) -> NoiseBound {
        let scaled = a.bits - self.prime_bits + 1.0;
        let rounding = self.log_t + log2_add(self.log_s1, 0.0);
        NoiseBound {
            bits: log2_add(scaled.max(0.0), rounding),
        }
    }

    /// Bits of modulus needed for correct decryption at this bound.
    pub fn required_modulus_bits(&self, a: NoiseBound) -> f64 {
        a.bits + self.log_t + 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::BgvParams;

    #[test]
    fn monotone_and_sane() {
        let ctx = BgvContext::new(BgvParams::desk_cosim()).unwrap();
        let nm = NoiseModel::new(&ctx);
        let f = nm.fresh();
        assert!(f.bits > 0.0 && f.bits < 40.0);
        let m = nm.after_mul(f, f);
        assert!(m.bits > f.bits);
        let ms = nm.after_mod_switch(m);
        assert!(ms.bits < m.bits);
        let a = nm.after_add(f, f);
        assert!((a.bits - (f.bits + 1.0)).abs() < 1e-9);
    }
}
