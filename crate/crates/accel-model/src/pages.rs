//! Host-side page transfer between residue polynomials and the banked
//! scratchpad.
//!
//! Coefficient pages store coefficient i at (row, col) = (i / cols,
//! i mod cols).  Evaluation pages use the same row-major view but in
//! evaluation-index order: the canonical transform output keeps value j at
//! stored position bitrev(j), and that reversal is undone on load and
//! reapplied on store, so element (r, c) holds the value at evaluation
//! index cols*r + c.  The index-order view is what makes both the
//! transform's write-back and the automorphism routes expressible as
//! affine-XOR lane moves.

use crate::banked::BankedMemory;
use crate::error::AccelError;
use rns_ring::mont::{to_centered, to_unsigned};
use rns_ring::poly::{bitrev, Domain, ResiduePoly};
use rns_ring::NttPrime;

fn check_shape(mem: &BankedMemory, n: usize) {
    assert_eq!(mem.geometry.words(), n, "page shape does not match the ring degree");
}

pub fn load_coeff_page(
    mem: &mut BankedMemory,
    page: u32,
    poly: &ResiduePoly,
) -> Result<(), AccelError> {
    assert_eq!(poly.domain, Domain::Coefficient);
    check_shape(mem, poly.n());
    let cols = mem.geometry.cols;
    let q = poly.prime.q;
    for (i, &v) in poly.coeffs.iter().enumerate() {
        mem.poke(page, i / cols, i % cols, to_unsigned(v, q))?;
    }
    Ok(())
}

pub fn read_coeff_page(
    mem: &BankedMemory,
    page: u32,
    prime: NttPrime,
) -> Result<ResiduePoly, AccelError> {
    check_shape(mem, prime.n());
    let cols = mem.geometry.cols;
    let mut coeffs = vec![0i64; prime.n()];
    for (i, slot) in coeffs.iter_mut().enumerate() {
        *slot = to_centered(mem.peek(page, i / cols, i % cols)?, prime.q);
    }
    Ok(ResiduePoly::from_coeffs(prime, Domain::Coefficient, coeffs))
}

pub fn load_eval_page(
    mem: &mut BankedMemory,
    page: u32,
    poly: &ResiduePoly,
) -> Result<(), AccelError> {
    assert_eq!(poly.domain, Domain::Evaluation);
    check_shape(mem, poly.n());
    let cols = mem.geometry.cols;
    let n_log = poly.prime.n_log;
    let q = poly.prime.q;
    for n in 0..poly.n() {
        let v = poly.coeffs[bitrev(n, n_log)];
        mem.poke(page, n / cols, n % cols, to_unsigned(v, q))?;
    }
    Ok(())
}

pub fn read_eval_page(
    mem: &BankedMemory,
    page: u32,
    prime: NttPrime,
) -> Result<ResiduePoly, AccelError> {
    check_shape(mem, prime.n());
    let cols = mem.geometry.cols;
    let mut coeffs = vec![0i64; prime.n()];
    for n in 0..prime.n() {
        let w = mem.peek(page, n / cols, n % cols)?;
        coeffs[bitrev(n, prime.n_log)] = to_centered(w, prime.q);
    }
    Ok(ResiduePoly::from_coeffs(prime, Domain::Evaluation, coeffs))
}
