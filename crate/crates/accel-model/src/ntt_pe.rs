//! Transform unit model: four parallel sub-transform pipelines working on
//! one matrix column or row each, fed and drained through the permutation
//! unit so every scratchpad access is a conflict-free column or row burst.
//!
//! Pass 1 runs the column-length negacyclic kernel with the cross factors
//! folded in; pass 2 runs the row-length cyclic kernel.  The pass-2 output
//! wiring already emits lanes in evaluation-index order (the butterfly's
//! bit-reversal is fixed wiring inside the unit), so the write-back lane
//! moves stay affine-XOR.  Results are bit-identical to the two-pass
//! reference transform.

use crate::banked::BankedMemory;
use crate::error::AccelError;
use crate::omega::{permute, PermutationSpec};
use rns_ring::mont::mont_mul_u32;
use rns_ring::poly::bitrev;
use rns_ring::twiddle::{power_generator_mont, TwoPassTwiddles};

/// Parallel sub-transform pipelines in the unit.
pub const NTT_UNITS: usize = 4;

/// Modular multipliers instantiated by one pipelined sub-transform: one
/// rank per stage of the three-stage decomposition plus the shared scaling
/// multiplier, in place of the naive (radix/2)*log2(radix).
pub fn multiplier_count(radix: usize) -> usize {
    assert!(radix.is_power_of_two());
    3 * radix + 1
}

pub fn naive_multiplier_count(radix: usize) -> usize {
    assert!(radix.is_power_of_two());
    radix / 2 * radix.trailing_zeros() as usize
}

fn butterfly_dif(x: &mut [u32], tw_mont: &[u32], q: u32, low_fixed: u32) {
    let n = x.len();
    let qq = q as u64;
    let mut half = n / 2;
    while half >= 1 {
        let stride = n / (2 * half);
        for block in 0..stride {
            let base = block * 2 * half;
            for j in 0..half {
                let a = x[base + j] as u64;
                let b = x[base + j + half] as u64;
                let sum = a + b;
                let sum = if sum >= qq { sum - qq } else { sum };
                let diff = a + qq - b;
                let diff = if diff >= qq { diff - qq } else { diff };
                x[base + j] = sum as u32;
                x[base + j + half] = mont_mul_u32(diff as u32, tw_mont[j * stride], q, low_fixed);
            }
        }
        half /= 2;
    }
}

fn butterfly_dit(x: &mut [u32], tw_inv_mont: &[u32], q: u32, low_fixed: u32) {
    let n = x.len();
    let qq = q as u64;
    let mut half = 1;
    while half <= n / 2 {
        let stride = n / (2 * half);
        for block in 0..stride {
            let base = block * 2 * half;
            for j in 0..half {
                let a = x[base + j] as u64;
                let b =
                    mont_mul_u32(x[base + j + half], tw_inv_mont[j * stride], q, low_fixed) as u64;
                let sum = a + b;
                let sum = if sum >= qq { sum - qq } else { sum };
                let diff = a + qq - b;
                let diff = if diff >= qq { diff - qq } else { diff };
                x[base + j] = sum as u32;
                x[base + j + half] = diff as u32;
            }
        }
        half *= 2;
    }
}

/// Column kernel: lanes in row order for source column `col`; output lane
/// b1 belongs to scratch row b1 of the same column.
fn forward_pass1(lanes: &[u32], col: usize, tw: &TwoPassTwiddles) -> Vec<u32> {
    assert_eq!(lanes.len(), tw.n1);
    let q = tw.prime.q;
    let lf = tw.prime.low_fixed;
    let m1 = tw.n1.trailing_zeros();
    let mut x: Vec<u32> = lanes
        .iter()
        .zip(&tw.pre_pass1)
        .map(|(&v, &t)| mont_mul_u32(v, t, q, lf))
        .collect();
    butterfly_dif(&mut x, &tw.butterfly_pass1, q, lf);
    let factors = power_generator_mont(tw.post_seeds[col], tw.n1 - 1, &tw.prime);
    for (b1, v) in x.iter_mut().enumerate() {
        let k1 = bitrev(b1, m1);
        if k1 != 0 {
            *v = mont_mul_u32(*v, factors[k1 - 1], q, lf);
        }
    }
    x
}

/// Row kernel: lanes in column order for scratch row `row`; output lane v
/// belongs to destination row v of evaluation column bitrev(row).
fn forward_pass2(lanes: &[u32], tw: &TwoPassTwiddles) -> Vec<u32> {
    assert_eq!(lanes.len(), tw.n2);
    let q = tw.prime.q;
    let lf = tw.prime.low_fixed;
    let m2 = tw.n2.trailing_zeros();
    let mut x: Vec<u32> = lanes
        .iter()
        .zip(&tw.pre_pass2)
        .map(|(&v, &t)| mont_mul_u32(v, t, q, lf))
        .collect();
    butterfly_dif(&mut x, &tw.butterfly_pass2, q, lf);
    let mut out = vec![0u32; tw.n2];
    for (b2, &v) in x.iter().enumerate() {
        out[bitrev(b2, m2)] = v;
    }
    out
}

/// Inverse row kernel for evaluation column `col`; output lane c belongs
/// to scratch row bitrev(col), column c.
fn inverse_pass2(lanes: &[u32], col: usize, tw: &TwoPassTwiddles) -> Vec<u32> {
    assert_eq!(lanes.len(), tw.n2);
    let q = tw.prime.q;
    let lf = tw.prime.low_fixed;
    let m2 = tw.n2.trailing_zeros();
    let mut x: Vec<u32> = (0..tw.n2).map(|b2| lanes[bitrev(b2, m2)]).collect();
    butterfly_dit(&mut x, &tw.inv_butterfly_pass2, q, lf);
    let factors = power_generator_mont(tw.inv_post_seeds[col], tw.n2 - 1, &tw.prime);
    for (c, v) in x.iter_mut().enumerate() {
        *v = mont_mul_u32(*v, tw.inv_post_pass2[c], q, lf);
        if c != 0 {
            *v = mont_mul_u32(*v, factors[c - 1], q, lf);
        }
    }
    x
}

/// Inverse column kernel; lanes in row order, output lane r is the
/// coefficient at row r of the same column.
fn inverse_pass1(lanes: &[u32], tw: &TwoPassTwiddles) -> Vec<u32> {
    assert_eq!(lanes.len(), tw.n1);
    let q = tw.prime.q;
    let lf = tw.prime.low_fixed;
    let mut x = lanes.to_vec();
    butterfly_dit(&mut x, &tw.inv_butterfly_pass1, q, lf);
    for (r, v) in x.iter_mut().enumerate() {
        *v = mont_mul_u32(*v, tw.inv_post_pass1[r], q, lf);
    }
    x
}

/// Run up to four chunks through the unit.  Each chunk is tagged with its
/// column (pass 1) or scratch-row (pass 2, tag unused) index.
pub fn ntt_pe_execute(
    chunks: &[(usize, Vec<u32>)],
    tw: &TwoPassTwiddles,
    pass: u8,
) -> Vec<Vec<u32>> {
    assert!(chunks.len() <= NTT_UNITS);
    assert!(pass == 1 || pass == 2);
    chunks
        .iter()
        .map(|(idx, lanes)| match pass {
            1 => forward_pass1(lanes, *idx, tw),
            _ => forward_pass2(lanes, tw),
        })
        .collect()
}

/// Inverse counterpart; pass 2 chunks are tagged with their evaluation
/// column, pass 1 tags are unused.
pub fn intt_pe_execute(
    chunks: &[(usize, Vec<u32>)],
    tw: &TwoPassTwiddles,
    pass: u8,
) -> Vec<Vec<u32>> {
    assert!(chunks.len() <= NTT_UNITS);
    assert!(pass == 1 || pass == 2);
    chunks
        .iter()
        .map(|(idx, lanes)| match pass {
            2 => inverse_pass2(lanes, *idx, tw),
            _ => inverse_pass1(lanes, tw),
        })
        .collect()
}

/// Full forward transform of a coefficient page into an evaluation page,
/// with every access a column or row burst and every lane move an
/// affine-XOR spec.
pub fn page_ntt(
    mem: &mut BankedMemory,
    coeff: u32,
    scratch: u32,
    eval: u32,
    tw: &TwoPassTwiddles,
) -> Result<(), AccelError> {
    let g = mem.geometry;
    assert_eq!((tw.n1, tw.n2), (g.rows, g.cols));
    let m1 = g.rows.trailing_zeros();

    for base in (0..g.cols).step_by(NTT_UNITS) {
        let cols: Vec<usize> = (base..(base + NTT_UNITS).min(g.cols)).collect();
        let mut batch = Vec::with_capacity(cols.len());
        for &c in &cols {
            let lanes = mem.read_col(coeff, c)?;
            let spec = PermutationSpec::new(1, 0, c, g.rows)?;
            batch.push((c, permute(&lanes, &spec)?));
        }
        let outs = ntt_pe_execute(&batch, tw, 1);
        for (&c, out) in cols.iter().zip(outs) {
            let spec = PermutationSpec::new(1, 0, c, g.rows)?;
            mem.write_col(scratch, c, &permute(&out, &spec)?)?;
        }
    }

    for base in (0..g.rows).step_by(NTT_UNITS) {
        let rows: Vec<usize> = (base..(base + NTT_UNITS).min(g.rows)).collect();
        let mut batch = Vec::with_capacity(rows.len());
        for &r in &rows {
            let lanes = mem.read_row(scratch, r)?;
            let spec = PermutationSpec::new(1, 0, r, g.cols)?;
            batch.push((r, permute(&lanes, &spec)?));
        }
        let outs = ntt_pe_execute(&batch, tw, 2);
        for (&r, out) in rows.iter().zip(outs) {
            let dest_col = bitrev(r, m1);
            let spec = PermutationSpec::new(1, 0, dest_col, g.rows)?;
            mem.write_col(eval, dest_col, &permute(&out, &spec)?)?;
        }
    }
    Ok(())
}

/// Full inverse transform of an evaluation page into a coefficient page.
pub fn page_intt(
    mem: &mut BankedMemory,
    eval: u32,
    scratch: u32,
    coeff: u32,
    tw: &TwoPassTwiddles,
) -> Result<(), AccelError> {
    let g = mem.geometry;
    assert_eq!((tw.n1, tw.n2), (g.rows, g.cols));
    let m1 = g.rows.trailing_zeros();

    for base in (0..g.cols).step_by(NTT_UNITS) {
        let cols: Vec<usize> = (base..(base + NTT_UNITS).min(g.cols)).collect();
        let mut batch = Vec::with_capacity(cols.len());
        for &c in &cols {
            let lanes = mem.read_col(eval, c)?;
            let spec = PermutationSpec::new(1, 0, c, g.rows)?;
            batch.push((c, permute(&lanes, &spec)?));
        }
        let outs = intt_pe_execute(&batch, tw, 2);
        for (&c, out) in cols.iter().zip(outs) {
            let dest_row = bitrev(c, m1);
            let spec = PermutationSpec::new(1, 0, dest_row, g.cols)?;
            mem.write_row(scratch, dest_row, &permute(&out, &spec)?)?;
        }
    }

    for base in (0..g.cols).step_by(NTT_UNITS) {
        let cols: Vec<usize> = (base..(base + NTT_UNITS).min(g.cols)).collect();
        let mut batch = Vec::with_capacity(cols.len());
        for &c in &cols {
            let lanes = mem.read_col(scratch, c)?;
            let spec = PermutationSpec::new(1, 0, c, g.rows)?;
            batch.push((c, permute(&lanes, &spec)?));
        }
        let outs = intt_pe_execute(&batch, tw, 1);
        for (&c, out) in cols.iter().zip(outs) {
            let spec = PermutationSpec::new(1, 0, c, g.rows)?;
            mem.write_col(coeff, c, &permute(&out, &spec)?)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplier_budget_at_full_radix() {
        assert_eq!(multiplier_count(256), 769);
        assert_eq!(naive_multiplier_count(256), 1024);
        assert!(multiplier_count(256) < naive_multiplier_count(256));
    }
}
