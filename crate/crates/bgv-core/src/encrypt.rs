//! Key generation, encryption, decryption.
//!
//! Decryption computes phi = c0 + c1*s (+ c2*s^2) over the active primes,
//! lifts each coefficient to the symmetric integer, and splits
//! phi = kappa*m + t*e.  The message is [phi]_t * kappa^(-1) mod t; the
//! noise is (phi - [phi]_t) / t, reported as an infinity norm and as the
//! remaining budget log2(Q / 2t) - log2(max(|e|, 1)).

use crate::arith::{centered_u64, inv_mod_u64, mul_mod_u64};
use crate::ciphertext::Ciphertext;
use crate::crt::CrtBasis;
use crate::error::BgvError;
use crate::keys::{PublicKey, SecretKey};
use crate::params::BgvContext;
use crate::sampling::Sampler;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rns_ring::{Domain, RnsPoly};

pub fn keygen(ctx: &BgvContext, sampler: &mut Sampler) -> Result<(SecretKey, PublicKey), BgvError> {
    let n = ctx.n();
    if let Some(w) = ctx.params.secret_weight {
        if w > n {
            return Err(BgvError::BadSecretWeight { weight: w, n });
        }
    }
    let sk = SecretKey {
        coeffs: sampler.ternary_poly(n, ctx.params.secret_weight),
    };
    let primes = ctx.active_primes(ctx.top_level());
    let s_eval = sk.to_eval(ctx, primes);
    let a = uniform_eval(ctx, sampler, primes);
    let e = RnsPoly::from_int_coeffs(primes, &sampler.gaussian_poly(n));
    // b = -a*s + t*e  so that  b + a*s = t*e.
    let mut b = a.clone();
    b.pointwise_mul_assign(&s_eval)?;
    b.negate();
    let mut te = ctx.ring.to_eval(&e);
    te.scalar_mul_assign(ctx.params.plain_modulus as i64);
    b.add_assign(&te)?;
    Ok((sk, PublicKey { b, a }))
}

fn uniform_eval(ctx: &BgvContext, sampler: &mut Sampler, primes: &[rns_ring::NttPrime]) -> RnsPoly {
    let n = ctx.n();
    let residues = primes
        .iter()
        .map(|&p| {
            rns_ring::ResiduePoly::from_coeffs(p, Domain::Evaluation, sampler.uniform_poly(n, p.q))
        })
        .collect();
    RnsPoly { residues }
}

/// Encrypt centered plaintext coefficients (mod t) at the top level.
pub fn encrypt(
    ctx: &BgvContext,
    pk: &PublicKey,
    plaintext: &[i64],
    sampler: &mut Sampler,
) -> Result<Ciphertext, BgvError> {
    let n = ctx.n();
    assert_eq!(plaintext.len(), n);
    let t = ctx.params.plain_modulus;
    let primes = ctx.active_primes(ctx.top_level());
    let u = ctx
        .ring
        .to_eval(&RnsPoly::from_int_coeffs(primes, &sampler.ternary_poly(n, None)));
    let m = ctx
        .ring
        .to_eval(&RnsPoly::from_int_coeffs(primes, plaintext));

    let mut c0 = pk.b.clone();
    c0.pointwise_mul_assign(&u)?;
    let mut e0 = ctx
        .ring
        .to_eval(&RnsPoly::from_int_coeffs(primes, &sampler.gaussian_poly(n)));
    e0.scalar_mul_assign(t as i64);
    c0.add_assign(&e0)?;
    c0.add_assign(&m)?;

    let mut c1 = pk.a.clone();
    c1.pointwise_mul_assign(&u)?;
    let mut e1 = ctx
        .ring
        .to_eval(&RnsPoly::from_int_coeffs(primes, &sampler.gaussian_poly(n)));
    e1.scalar_mul_assign(t as i64);
    c1.add_assign(&e1)?;

    Ok(Ciphertext {
        parts: vec![c0, c1],
        level: ctx.top_level(),
        kappa: 1,
        plain_modulus: t,
    })
}

#[derive(Debug, Clone)]
pub struct DecryptOutput {
    /// Centered message coefficients mod the ciphertext's plaintext modulus.
    pub message: Vec<i64>,
    /// Infinity norm of the noise polynomial.
    pub noise_inf: BigInt,
    /// log2 of the noise infinity norm (0 for zero noise).
    pub noise_bits: f64,
    /// Remaining headroom in bits before decryption fails.
    pub budget_bits: f64,
}

pub fn decrypt(ctx: &BgvContext, sk: &SecretKey, ct: &Ciphertext) -> Result<DecryptOutput, BgvError> {
    let level = ct.level;
    if level == 0 || level > ctx.top_level() {
        return Err(BgvError::BadLevel {
            level,
            max: ctx.top_level(),
        });
    }
    let primes = ctx.active_primes(level);
    let basis = ctx.q_basis(level);
    let t = ct.plain_modulus;
    let kappa_inv = inv_mod_u64(ct.kappa, t).ok_or(BgvError::NotAUnit {
        value: ct.kappa,
        modulus: t,
    })?;

    // phi = sum_i c_i * s^i over the active primes, evaluation domain.
    let s_eval = sk.to_eval(ctx, primes);
    let mut phi = ct.parts[0].clone();
    let mut s_pow = s_eval.clone();
    for part in &ct.parts[1..] {
        let mut term = part.clone();
        term.pointwise_mul_assign(&s_pow)?;
        phi.add_assign(&term)?;
        s_pow.pointwise_mul_assign(&s_eval)?;
    }
    let phi_coeff = ctx.ring.to_coeff(&phi);

    let n = ctx.n();
    let mut message = Vec::with_capacity(n);
    let mut noise_inf = BigInt::zero();
    let t_big = BigInt::from(t);
    for j in 0..n {
        let residues: Vec<i64> = phi_coeff.residues.iter().map(|r| r.coeffs[j]).collect();
        let phi_j = basis.lift_symmetric(&residues);
        let m_scaled = CrtBasis::reduce_centered(&phi_j, t);
        let e_j = (&phi_j - m_scaled) / &t_big;
        if e_j.abs() > noise_inf {
            noise_inf = e_j.abs();
        }
        // un-scale the correction factor
        let m_std = if m_scaled < 0 { m_scaled + t as i64 } else { m_scaled } as u64;
        message.push(centered_u64(mul_mod_u64(m_std, kappa_inv, t), t));
    }
    let noise_bits = if noise_inf.is_zero() {
        0.0
    } else {
        bigint_log2(&noise_inf)
    };
    let budget_bits = ctx.log2_q(level) - 1.0 - (t as f64).log2() - noise_bits;
    Ok(DecryptOutput {
        message,
        noise_inf,
        noise_bits,
        budget_bits,
    })
}

pub fn bigint_log2(v: &BigInt) -> f64 {
    let (_, digits) = v.to_u64_digits();
    match digits.len() {
        0 => 0.0,
        1 => (digits[0] as f64).log2(),
        k => {
            let top = digits[k - 1] as f64;
            let next = digits[k - 2] as f64;
            ((top * 2f64.powi(64) + next) as f64).log2() + 64.0 * (k as f64 - 2.0)
        }
    }
}

/// Direct symmetric-key encryption with independently chosen noise, used by
/// tests that need a ciphertext with a prescribed payload and plaintext
/// modulus at a prescribed level.
pub fn encrypt_at_level(
    ctx: &BgvContext,
    sk: &SecretKey,
    plaintext: &[i64],
    plain_modulus: u64,
    level: usize,
    sampler: &mut Sampler,
) -> Result<Ciphertext, BgvError> {
    let primes = ctx.active_primes(level);
    let n = ctx.n();
    let s_eval = sk.to_eval(ctx, primes);
    let a = uniform_eval(ctx, sampler, primes);
    let m = ctx.ring.to_eval(&RnsPoly::from_int_coeffs(primes, plaintext));
    let mut e = ctx
        .ring
        .to_eval(&RnsPoly::from_int_coeffs(primes, &sampler.gaussian_poly(n)));
    e.scalar_mul_assign(plain_modulus as i64);
    // c0 = -a*s + t*e + m, c1 = a.
    let mut c0 = a.clone();
    c0.pointwise_mul_assign(&s_eval)?;
    c0.negate();
    c0.add_assign(&e)?;
    c0.add_assign(&m)?;
    Ok(Ciphertext {
        parts: vec![c0, a],
        level,
        kappa: 1,
        plain_modulus,
    })
}
