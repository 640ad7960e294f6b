//! Balanced digit extraction: tables, a scalar reference, and the
//! homomorphic version that walks a raised ciphertext from precision e
//! down to r, stripping one balanced base-p digit per pass.
//!
//! At precision j the lowest digit of v is isolated with one polynomial
//! evaluation: y = v^(p^(j-1)) depends only on v mod p (lifting the
//! Frobenius), and the interpolation table g_j maps y back to the digit's
//! balanced value.  Subtracting and dividing by p is exact and free.

use crate::error::BootstrapError;
use bgv_core::arith::{inv_mod_u64, mul_mod_u64, pow_mod_u64};
use bgv_core::{he_add, he_add_scalar, he_exact_divide_by, he_mul, he_scalar_mul, he_sub};
use bgv_core::{BgvContext, Ciphertext, KswKey};
use rns_ring::mont::centered_rem;

/// Balanced digit set for odd p: -(p-1)/2 ..= (p-1)/2.
pub fn balanced_digits(p: u64) -> Vec<i64> {
    let half = (p as i64 - 1) / 2;
    (-half..=half).collect()
}

/// Interpolation table for precision j >= 2: the unique polynomial of
/// degree < p over Z_{p^j} with g(d^(p^(j-1))) = d for every balanced
/// digit d.  Returned as centered coefficients, constant term first.
pub fn digit_poly(p: u64, j: u32) -> Vec<i64> {
    assert!(j >= 2);
    let m = p.pow(j);
    let digits = balanced_digits(p);
    let nodes: Vec<u64> = digits
        .iter()
        .map(|&d| pow_mod_u64(d.rem_euclid(m as i64) as u64, p.pow(j - 1), m))
        .collect();

    let k = nodes.len();
    let mut coeffs = vec![0u64; k];
    for (i, &di) in digits.iter().enumerate() {
        // numerator prod_{l != i} (Y - node_l), built incrementally
        let mut numer = vec![0u64; k];
        numer[0] = 1;
        let mut deg = 0;
        for (l, &nl) in nodes.iter().enumerate() {
            if l == i {
                continue;
            }
            let neg = (m - nl % m) % m;
            let mut next = vec![0u64; k];
            for idx in 0..=deg {
                next[idx + 1] = (next[idx + 1] + numer[idx]) % m;
                next[idx] = (next[idx] + mul_mod_u64(numer[idx], neg, m)) % m;
            }
            numer = next;
            deg += 1;
        }
        let mut den = 1u64;
        for (l, &nl) in nodes.iter().enumerate() {
            if l != i {
                den = mul_mod_u64(den, (m + nodes[i] % m - nl % m) % m, m);
            }
        }
        assert_ne!(den % p, 0, "interpolation nodes stay distinct mod p");
        let den_inv = inv_mod_u64(den, m).expect("unit denominator");
        let scale = mul_mod_u64(di.rem_euclid(m as i64) as u64, den_inv, m);
        for (c, &nc) in coeffs.iter_mut().zip(&numer) {
            *c = (*c + mul_mod_u64(scale, nc, m)) % m;
        }
    }
    coeffs
        .into_iter()
        .map(|c| centered_rem(c as i128, m))
        .collect()
}

/// Scalar digit extraction: strip e - r balanced digits from w mod p^e,
/// returning the rounded high part mod p^r.
pub fn extract_scalar(w: i64, p: u64, e: u32, r: u32) -> i64 {
    let mut v = centered_rem(w as i128, p.pow(e));
    for step in 0..(e - r) {
        let j = e - step;
        let m = p.pow(j);
        let vm = v.rem_euclid(m as i64) as u64;
        let y = pow_mod_u64(vm, p.pow(j - 1), m);
        let table = digit_poly(p, j);
        let mut acc = 0i128;
        for &c in table.iter().rev() {
            acc = centered_rem(acc * y as i128 + c as i128, m) as i128;
        }
        let d = centered_rem(acc, m);
        assert_eq!((v - d).rem_euclid(p as i64), 0);
        v = centered_rem((v - d) as i128 / p as i128, p.pow(j - 1));
    }
    centered_rem(v as i128, p.pow(r))
}

/// Bring two ciphertexts to the lower of their two levels.
pub fn align_levels(
    ctx: &BgvContext,
    a: &Ciphertext,
    b: &Ciphertext,
) -> Result<(Ciphertext, Ciphertext), BootstrapError> {
    let lvl = a.level.min(b.level);
    Ok((
        bgv_core::mod_switch_to_level(ctx, a, lvl)?,
        bgv_core::mod_switch_to_level(ctx, b, lvl)?,
    ))
}

/// Multiply with level alignment and the switch-after-multiply policy.
pub fn mul_managed(
    ctx: &BgvContext,
    a: &Ciphertext,
    b: &Ciphertext,
    relin: &KswKey,
) -> Result<Ciphertext, BootstrapError> {
    let (a, b) = align_levels(ctx, a, b)?;
    let prod = he_mul(ctx, &a, &b, relin)?;
    Ok(bgv_core::mod_switch(ctx, &prod)?)
}

/// v -> v^p by square and multiply.
fn pow_p(
    ctx: &BgvContext,
    v: &Ciphertext,
    p: u64,
    relin: &KswKey,
) -> Result<Ciphertext, BootstrapError> {
    assert!(p >= 3);
    let mut result: Option<Ciphertext> = None;
    let mut square = v.clone();
    let mut remaining = p;
    loop {
        if remaining & 1 == 1 {
            result = Some(match result {
                None => square.clone(),
                Some(acc) => mul_managed(ctx, &acc, &square, relin)?,
            });
        }
        remaining >>= 1;
        if remaining == 0 {
            break;
        }
        square = mul_managed(ctx, &square, &square, relin)?;
    }
    Ok(result.expect("p >= 3"))
}

/// Evaluate a digit table on a ciphertext: powers of y up to deg, then the
/// scalar combination.
fn eval_table(
    ctx: &BgvContext,
    y: &Ciphertext,
    table: &[i64],
    relin: &KswKey,
) -> Result<Ciphertext, BootstrapError> {
    let deg = table.len() - 1;
    let mut powers: Vec<Ciphertext> = Vec::with_capacity(deg);
    powers.push(y.clone());
    for k in 2..=deg {
        let half = k / 2;
        let next = mul_managed(ctx, &powers[half - 1], &powers[k - half - 1], relin)?;
        powers.push(next);
    }
    let floor = powers.last().expect("degree >= 1").level;
    let mut acc = he_scalar_mul(&bgv_core::mod_switch_to_level(ctx, &powers[0], floor)?, table[1]);
    for (k, &c) in table.iter().enumerate().skip(2) {
        if c == 0 {
            continue;
        }
        let term = he_scalar_mul(&bgv_core::mod_switch_to_level(ctx, &powers[k - 1], floor)?, c);
        acc = he_add(ctx, &acc, &term)?;
    }
    Ok(he_add_scalar(&acc, table[0]))
}

/// Homomorphic digit extraction on the working chain.  Input encrypts a
/// value mod p^e; output encrypts round(value / p^(e-r)) mod p^r.
pub fn extract_homomorphic(
    ctx: &BgvContext,
    ct: &Ciphertext,
    p: u64,
    e: u32,
    r: u32,
    relin: &KswKey,
) -> Result<Ciphertext, BootstrapError> {
    assert_eq!(ct.plain_modulus, p.pow(e));
    let mut v = ct.clone();
    for step in 0..(e - r) {
        let j = e - step;
        let mut y = v.clone();
        for _ in 0..(j - 1) {
            y = pow_p(ctx, &y, p, relin)?;
        }
        let digit = eval_table(ctx, &y, &digit_poly(p, j), relin)?;
        let (v_aligned, digit) = align_levels(ctx, &v, &digit)?;
        let stripped = he_sub(ctx, &v_aligned, &digit)?;
        v = he_exact_divide_by(ctx, &stripped, p)?;
    }
    Ok(v)
}
