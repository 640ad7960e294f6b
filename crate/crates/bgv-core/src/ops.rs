//! Homomorphic operations.  All ciphertext parts stay in the evaluation
//! domain; three-part tensors appear only transiently inside `he_mul`.

use crate::arith::{centered_u64, inv_mod_u64, mul_mod_u64};
use crate::ciphertext::Ciphertext;
use crate::error::BgvError;
use crate::keys::KswKey;
use crate::keyswitch::apply_ksw;
use crate::params::BgvContext;
use rns_ring::RnsPoly;

fn check_binary(a: &Ciphertext, b: &Ciphertext) -> Result<(), BgvError> {
    if a.level != b.level {
        return Err(BgvError::LevelMismatch {
            left: a.level,
            right: b.level,
        });
    }
    if a.plain_modulus != b.plain_modulus {
        return Err(BgvError::PlainModulusMismatch {
            left: a.plain_modulus,
            right: b.plain_modulus,
        });
    }
    Ok(())
}

/// Scale parts by an integer; multiplies message and noise alike, so the
/// correction factor is untouched.
pub fn he_scalar_mul(ct: &Ciphertext, scalar: i64) -> Ciphertext {
    let mut out = ct.clone();
    for p in out.parts.iter_mut() {
        p.scalar_mul_assign(scalar);
    }
    out
}

/// Bring the correction factors of two ciphertexts into agreement by
/// scaling whichever side needs the smaller centered multiplier.
fn equalize_kappa(a: &mut Ciphertext, b: &mut Ciphertext) -> Result<(), BgvError> {
    if a.kappa == b.kappa {
        return Ok(());
    }
    let t = a.plain_modulus;
    let a_inv = inv_mod_u64(a.kappa, t).ok_or(BgvError::NotAUnit { value: a.kappa, modulus: t })?;
    let b_inv = inv_mod_u64(b.kappa, t).ok_or(BgvError::NotAUnit { value: b.kappa, modulus: t })?;
    // scale a by kb/ka to reach kb, or b by ka/kb to reach ka
    let scale_a = centered_u64(mul_mod_u64(b.kappa, a_inv, t), t);
    let scale_b = centered_u64(mul_mod_u64(a.kappa, b_inv, t), t);
    if scale_a.abs() <= scale_b.abs() {
        for p in a.parts.iter_mut() {
            p.scalar_mul_assign(scale_a);
        }
        a.kappa = b.kappa;
    } else {
        for p in b.parts.iter_mut() {
            p.scalar_mul_assign(scale_b);
        }
        b.kappa = a.kappa;
    }
    Ok(())
}

pub fn he_add(_ctx: &BgvContext, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext, BgvError> {
    check_binary(a, b)?;
    let mut a = a.clone();
    let mut b = b.clone();
    equalize_kappa(&mut a, &mut b)?;
    for (pa, pb) in a.parts.iter_mut().zip(&b.parts) {
        pa.add_assign(pb)?;
    }
    Ok(a)
}

pub fn he_sub(ctx: &BgvContext, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext, BgvError> {
    let neg = he_scalar_mul(b, -1);
    he_add(ctx, a, &neg)
}

/// Add a constant to every plaintext coefficient (constant polynomial).
/// The addend is pre-scaled by kappa so decryption sees m + delta.
pub fn he_add_scalar(ct: &Ciphertext, delta: i64) -> Ciphertext {
    let t = ct.plain_modulus;
    let d = delta.rem_euclid(t as i64) as u64;
    let add = centered_u64(mul_mod_u64(ct.kappa, d, t), t);
    let mut out = ct.clone();
    for r in out.parts[0].residues.iter_mut() {
        let q = r.prime.q;
        let a = rns_ring::mont::centered_rem(add as i128, q as u64);
        for c in r.coeffs.iter_mut() {
            *c = rns_ring::mont::add_centered(*c, a, q);
        }
    }
    out
}

/// Multiply by a plaintext polynomial given as centered integer
/// coefficients mod t.
pub fn he_plain_mul(
    ctx: &BgvContext,
    ct: &Ciphertext,
    plain: &[i64],
) -> Result<Ciphertext, BgvError> {
    let primes = ctx.active_primes(ct.level);
    let m = ctx
        .ring
        .to_eval(&RnsPoly::from_int_coeffs(primes, plain));
    let mut out = ct.clone();
    for p in out.parts.iter_mut() {
        p.pointwise_mul_assign(&m)?;
    }
    Ok(out)
}

/// Tensor product followed immediately by relinearization; the result has
/// two parts again and kappa = kappa_a * kappa_b.
pub fn he_mul(
    ctx: &BgvContext,
    a: &Ciphertext,
    b: &Ciphertext,
    relin: &KswKey,
) -> Result<Ciphertext, BgvError> {
    check_binary(a, b)?;
    if a.parts.len() != 2 || b.parts.len() != 2 {
        return Err(BgvError::PartCount {
            parts: a.parts.len().max(b.parts.len()),
            expected: 2,
        });
    }
    let t = a.plain_modulus;
    let mut c0 = a.parts[0].clone();
    c0.pointwise_mul_assign(&b.parts[0])?;
    let mut c1 = a.parts[0].clone();
    c1.pointwise_mul_assign(&b.parts[1])?;
    let mut c1b = a.parts[1].clone();
    c1b.pointwise_mul_assign(&b.parts[0])?;
    c1.add_assign(&c1b)?;
    let mut c2 = a.parts[1].clone();
    c2.pointwise_mul_assign(&b.parts[1])?;

    let (d0, d1) = apply_ksw(ctx, relin, &c2, a.level)?;
    c0.add_assign(&d0)?;
    c1.add_assign(&d1)?;
    Ok(Ciphertext {
        parts: vec![c0, c1],
        level: a.level,
        kappa: mul_mod_u64(a.kappa, b.kappa, t),
        plain_modulus: t,
    })
}

/// Apply X -> X^k to the plaintext (slot permutation for packed data) and
/// switch the key back to s with the matching rotation key.
pub fn he_automorphism(
    ctx: &BgvContext,
    ct: &Ciphertext,
    k: usize,
    rot_key: &KswKey,
) -> Result<Ciphertext, BgvError> {
    if ct.parts.len() != 2 {
        return Err(BgvError::PartCount {
            parts: ct.parts.len(),
            expected: 2,
        });
    }
    let c0m = ct.parts[0].automorphism(k)?;
    let c1m = ct.parts[1].automorphism(k)?;
    let (d0, d1) = apply_ksw(ctx, rot_key, &c1m, ct.level)?;
    let mut c0 = c0m;
    c0.add_assign(&d0)?;
    Ok(Ciphertext {
        parts: vec![c0, d1],
        level: ct.level,
        kappa: ct.kappa,
        plain_modulus: ct.plain_modulus,
    })
}

/// Divide message and noise by the plaintext prime p: multiply parts by
/// [p^(-1)] mod the active modulus and step the plaintext modulus down one
/// rung.  Only valid when the message is divisible by p, which the digit
/// removal loop guarantees.
pub fn he_exact_divide_by(
    ctx: &BgvContext,
    ct: &Ciphertext,
    p: u64,
) -> Result<Ciphertext, BgvError> {
    assert_eq!(ct.plain_modulus % p, 0);
    let primes = ctx.active_primes(ct.level);
    let scalars: Vec<i64> = primes
        .iter()
        .map(|pr| {
            let pinv = rns_ring::mont::inv_mod((p % pr.q as u64) as u32, pr.q);
            rns_ring::mont::to_centered(pinv, pr.q)
        })
        .collect();
    let mut out = ct.clone();
    for part in out.parts.iter_mut() {
        part.scalar_mul_rns_assign(&scalars);
    }
    out.plain_modulus = ct.plain_modulus / p;
    out.kappa = ct.kappa % out.plain_modulus;
    Ok(out)
}
