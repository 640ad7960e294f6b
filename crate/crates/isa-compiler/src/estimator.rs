//! Static noise and correction-exponent tracking used by the lowering policy.
//!
//! The estimator never touches ciphertext data.  Noise follows the worst-case
//! log-domain model; the correction exponent follows the exact mod-t
//! arithmetic the runtime performs, so the metadata annotations on lowered
//! instructions agree with what execution produces.

use crate::params::CompilerConfig;
use crate::tables::ChainTables;
use bgv_core::arith::{centered_u64, inv_mod_u64, mul_mod_u64};
use bgv_core::{NoiseBound, NoiseModel};

/// Level, noise bound and correction exponent of one live ciphertext.
#[derive(Debug, Clone, Copy)]
pub struct CtState {
    pub level: usize,
    pub noise: NoiseBound,
    pub kappa: u64,
}

/// Which operand a correction-exponent equalization scales.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EqualizeSide {
    None,
    Left(i64),
    Right(i64),
}

pub struct Estimator {
    pub model: NoiseModel,
    pub t: u64,
    threshold: f64,
    log_q_prefix: Vec<f64>,
}

impl Estimator {
    pub fn new(config: &CompilerConfig, tables: &ChainTables) -> Self {
        let p = &config.bgv;
        let s1 = p.secret_weight.unwrap_or(p.n()) as f64;
        let model = NoiseModel {
            log_n: (p.n() as f64).log2(),
            log_t: (p.plain_modulus as f64).log2(),
            log_s1: s1.log2(),
            log_b: (6.0 * p.sigma).ceil().log2(),
            prime_bits: p.prime_bits as f64,
            log_p_ext: tables
                .chain
                .p_primes
                .iter()
                .map(|q| (q.q as f64).log2())
                .sum(),
            digit_bits: p.digit_width as f64 * p.prime_bits as f64,
            digit_count_max: p.count_q.div_ceil(p.digit_width),
        };
        let mut log_q_prefix = vec![0.0];
        for q in &tables.chain.q_primes {
            let last = *log_q_prefix.last().unwrap();
            log_q_prefix.push(last + (q.q as f64).log2());
        }
        Estimator {
            model,
            t: p.plain_modulus,
            threshold: config.bootstrap_threshold,
            log_q_prefix,
        }
    }

    pub fn log2_q(&self, level: usize) -> f64 {
        self.log_q_prefix[level]
    }

    /// Decryption headroom in bits; at or below zero the value is lost.
    pub fn budget(&self, s: &CtState) -> f64 {
        self.log2_q(s.level) - self.model.required_modulus_bits(s.noise)
    }

    pub fn fresh(&self, level: usize) -> CtState {
        CtState {
            level,
            noise: self.model.fresh(),
            kappa: 1,
        }
    }

    pub fn switched_noise(&self, noise: NoiseBound, steps: usize) -> NoiseBound {
        (0..steps).fold(noise, |n, _| self.model.after_mod_switch(n))
    }

    /// State after dropping primes down to `target` active ones.
    pub fn after_mod_switch(&self, s: &CtState, target: usize, tables: &ChainTables) -> CtState {
        assert!(target <= s.level && target >= 1);
        CtState {
            level: target,
            noise: self.switched_noise(s.noise, s.level - target),
            kappa: mul_mod_u64(s.kappa, tables.kappa_drop_factor(s.level, target), self.t),
        }
    }

    /// Mirror of the runtime's exponent equalization before an add: scale the
    /// side whose centered ratio is smaller in magnitude.
    pub fn equalize(&self, a: &CtState, b: &CtState) -> (EqualizeSide, u64) {
        if a.kappa == b.kappa {
            return (EqualizeSide::None, a.kappa);
        }
        let t = self.t;
        let scale_a = centered_u64(mul_mod_u64(b.kappa, inv_mod_u64(a.kappa, t).expect("unit"), t), t);
        let scale_b = centered_u64(mul_mod_u64(a.kappa, inv_mod_u64(b.kappa, t).expect("unit"), t), t);
        if scale_a.unsigned_abs() <= scale_b.unsigned_abs() {
            (EqualizeSide::Left(scale_a), b.kappa)
        } else {
            (EqualizeSide::Right(scale_b), a.kappa)
        }
    }

    pub fn after_add(&self, a: &CtState, b: &CtState) -> CtState {
        assert_eq!(a.level, b.level);
        let (side, kappa) = self.equalize(a, b);
        let (na, nb) = match side {
            EqualizeSide::None => (a.noise, b.noise),
            EqualizeSide::Left(s) => (
                self.model
                    .after_scalar_mul(a.noise, (s.unsigned_abs().max(1) as f64).log2()),
                b.noise,
            ),
            EqualizeSide::Right(s) => (
                a.noise,
                self.model
                    .after_scalar_mul(b.noise, (s.unsigned_abs().max(1) as f64).log2()),
            ),
        };
        CtState {
            level: a.level,
            noise: self.model.after_add(na, nb),
            kappa,
        }
    }

    /// Best level to run a multiply at and the post-multiply budget there:
    /// the argmax over reachable levels (ties resolved toward fewer
    /// switches).
    pub fn best_mul(&self, a: &CtState, b: &CtState) -> (usize, f64) {
        let top = a.level.min(b.level);
        let mut best = (1usize, f64::NEG_INFINITY);
        for target in 1..=top {
            let na = self.switched_noise(a.noise, a.level - target);
            let nb = self.switched_noise(b.noise, b.level - target);
            let out = self
                .model
                .after_ksw(self.model.after_mul(na, nb), target);
            let budget = self.log2_q(target) - self.model.required_modulus_bits(out);
            if budget > best.1 + 1e-9 || (budget > best.1 - 1e-9 && target > best.0) {
                best = (target, budget);
            }
        }
        best
    }

    /// Like [`best_mul`](Self::best_mul) but None when every choice lands at
    /// or below the recryption threshold.
    pub fn choose_mul_level(&self, a: &CtState, b: &CtState) -> Option<usize> {
        let (target, budget) = self.best_mul(a, b);
        (budget > self.threshold).then_some(target)
    }

    /// State of the relinearized product once both operands sit at `target`.
    pub fn after_mul(&self, a: &CtState, b: &CtState, target: usize, tables: &ChainTables) -> CtState {
        let a = self.after_mod_switch(a, target, tables);
        let b = self.after_mod_switch(b, target, tables);
        CtState {
            level: target,
            noise: self
                .model
                .after_ksw(self.model.after_mul(a.noise, b.noise), target),
            kappa: mul_mod_u64(a.kappa, b.kappa, self.t),
        }
    }

    pub fn after_plain_mul(&self, a: &CtState, l1: u64) -> CtState {
        CtState {
            level: a.level,
            noise: self
                .model
                .after_plain_mul(a.noise, (l1.max(1) as f64).log2()),
            kappa: a.kappa,
        }
    }

    pub fn after_rotate(&self, a: &CtState) -> CtState {
        CtState {
            level: a.level,
            noise: self.model.after_ksw(a.noise, a.level),
            kappa: a.kappa,
        }
    }

    /// Recryption returns a near-fresh ciphertext at the exit level with the
    /// exponent reset.
    pub fn after_bootstrap(&self, exit_level: usize) -> CtState {
        CtState {
            level: exit_level,
            noise: self.model.fresh(),
            kappa: 1,
        }
    }
}
