//! Seeded samplers for key and encryption randomness.
//!
//! The error distribution is a discrete Gaussian (sigma defaults to 3.2)
//! drawn by rejection from the uniform integers in [-6 sigma, 6 sigma].
//! Secrets are ternary, either uniform over {-1, 0, 1} or with a fixed
//! hamming weight when the parameter set pins one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub struct Sampler {
    rng: ChaCha20Rng,
    sigma: f64,
}

impl Sampler {
    pub fn new(seed: u64, sigma: f64) -> Self {
        Sampler {
            rng: ChaCha20Rng::seed_from_u64(seed),
            sigma,
        }
    }

    /// Derive an independent stream for a subcomponent (key expansion,
    /// per-ciphertext randomness) so call order in one component cannot
    /// perturb another.
    pub fn fork(&mut self, label: u64) -> Sampler {
        let mut seed = [0u8; 32];
        self.rng.fill(&mut seed);
        for (i, b) in label.to_le_bytes().iter().enumerate() {
            seed[i] ^= b;
        }
        Sampler {
            rng: ChaCha20Rng::from_seed(seed),
            sigma: self.sigma,
        }
    }

    pub fn gaussian(&mut self) -> i64 {
        let bound = (6.0 * self.sigma).ceil() as i64;
        loop {
            let x = self.rng.gen_range(-bound..=bound);
            let p = (-((x * x) as f64) / (2.0 * self.sigma * self.sigma)).exp();
            if self.rng.gen::<f64>() < p {
                return x;
            }
        }
    }

    pub fn gaussian_poly(&mut self, n: usize) -> Vec<i64> {
        (0..n).map(|_| self.gaussian()).collect()
    }

    pub fn ternary_poly(&mut self, n: usize, weight: Option<usize>) -> Vec<i64> {
        match weight {
            None => (0..n).map(|_| self.rng.gen_range(-1i64..=1)).collect(),
            Some(w) => {
                assert!(w <= n);
                let mut v = vec![0i64; n];
                let mut placed = 0;
                while placed < w {
                    let idx = self.rng.gen_range(0..n);
                    if v[idx] == 0 {
                        v[idx] = if self.rng.gen::<bool>() { 1 } else { -1 };
                        placed += 1;
                    }
                }
                v
            }
        }
    }

    /// Uniform centered residues modulo q.
    pub fn uniform_poly(&mut self, n: usize, q: u32) -> Vec<i64> {
        let q = q as i64;
        (0..n).map(|_| self.rng.gen_range(0..q) - q / 2).collect()
    }

    /// Uniform centered values modulo t (plaintext payloads in tests).
    pub fn uniform_plain(&mut self, n: usize, t: u64) -> Vec<i64> {
        let t = t as i64;
        (0..n).map(|_| self.rng.gen_range(0..t) - t / 2).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moments_are_sane() {
        let mut s = Sampler::new(7, 3.2);
        let xs = s.gaussian_poly(20_000);
        let mean: f64 = xs.iter().map(|&x| x as f64).sum::<f64>() / xs.len() as f64;
        let var: f64 = xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.1, "mean {mean}");
        assert!((var.sqrt() - 3.2).abs() < 0.15, "sd {}", var.sqrt());
        assert!(xs.iter().all(|&x| x.abs() <= 20));
    }

    #[test]
    fn ternary_weight_exact() {
        let mut s = Sampler::new(8, 3.2);
        let v = s.ternary_poly(4096, Some(16));
        assert_eq!(v.iter().filter(|&&x| x != 0).count(), 16);
        assert!(v.iter().all(|&x| (-1..=1).contains(&x)));
    }

    #[test]
    fn deterministic_per_seed() {
        let a = Sampler::new(9, 3.2).gaussian_poly(64);
        let b = Sampler::new(9, 3.2).gaussian_poly(64);
        assert_eq!(a, b);
    }
}
