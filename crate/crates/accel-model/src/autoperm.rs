//! Automorphism routing over the banked layout.
//!
//! In the evaluation-index page view, X -> X^k moves the value at index
//! (k*j + (k-1)/2) mod N to index j.  Because the column index is the low
//! bits of j, whole columns map to whole columns: output column c pulls
//! from source column (k*c + delta) mod cols, and within the column the
//! lane movement is affine modulo the row count plus the two bank-striping
//! XORs.  Both passes therefore stay inside the permutation unit's family:
//! the read spec un-stripes the source column, the write spec applies the
//! row map and re-stripes for the destination column.  The carry of
//! k*c + delta past the column bits shifts the row map, so the write
//! offset varies per column while the multiplier is shared.

use crate::banked::{BankedMemory, Geometry};
use crate::error::AccelError;
use crate::omega::{permute, PermutationSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnRoute {
    pub src_col: usize,
    pub read: PermutationSpec,
    pub write: PermutationSpec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismPlan {
    /// Exponent reduced modulo 2N.
    pub k: usize,
    /// One route per output column.
    pub routes: Vec<ColumnRoute>,
    /// Set when the constructive solve failed and the plan came from
    /// exhaustive search instead; callers treat this as a reportable
    /// discrepancy, not business as usual.
    pub via_search: bool,
}

fn inv_mod_pow2(a: usize, m: usize) -> usize {
    assert!(m.is_power_of_two() && a % 2 == 1);
    let mask = m - 1;
    let mut x = 1usize;
    while (a.wrapping_mul(x)) & mask != 1 {
        x = x.wrapping_mul(2usize.wrapping_sub(a.wrapping_mul(x))) & mask;
    }
    x & mask
}

/// Check one column route against the index algebra: output element (r, c)
/// must receive the value at evaluation index (k*(cols*r + c) + delta) mod N.
fn route_is_correct(route: &ColumnRoute, k: usize, delta: usize, g: Geometry, c: usize) -> bool {
    let n = g.words();
    for beta in 0..g.rows {
        let src_index = g.cols * (beta ^ route.src_col) + route.src_col;
        let out_row = route.write.dest(route.read.dest(beta)) ^ c;
        let expected = (k * (g.cols * out_row + c) + delta) % n;
        if src_index != expected {
            return false;
        }
    }
    true
}

fn constructive_route(k: usize, delta: usize, g: Geometry, c: usize) -> ColumnRoute {
    let rows = g.rows;
    let t = k * c + delta;
    let src_col = t % g.cols;
    let gamma = (t / g.cols) % rows;
    let a = inv_mod_pow2(k & (rows - 1), rows);
    let b = (rows - (a * gamma) % rows) % rows;
    ColumnRoute {
        src_col,
        read: PermutationSpec::new(1, 0, src_col, rows).unwrap(),
        write: PermutationSpec::new(a, b, c, rows).unwrap(),
    }
}

fn search_route(k: usize, delta: usize, g: Geometry, c: usize) -> Option<ColumnRoute> {
    let rows = g.rows;
    if rows > 8 {
        return None;
    }
    for src_col in 0..g.cols {
        for a1 in (1..rows.max(2)).step_by(2) {
            for b1 in 0..rows {
                for x1 in 0..rows {
                    let read = PermutationSpec::new(a1, b1, x1, rows).unwrap();
                    for a2 in (1..rows.max(2)).step_by(2) {
                        for b2 in 0..rows {
                            for x2 in 0..rows {
                                let route = ColumnRoute {
                                    src_col,
                                    read,
                                    write: PermutationSpec::new(a2, b2, x2, rows).unwrap(),
                                };
                                if route_is_correct(&route, k, delta, g, c) {
                                    return Some(route);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

/// Build the per-column route plan applying X -> X^k to an evaluation page.
pub fn derive_automorphism_perm(k: usize, g: Geometry) -> Result<AutomorphismPlan, AccelError> {
    if k % 2 == 0 {
        return Err(AccelError::EvenAutomorphism { k });
    }
    let n = g.words();
    let k = k % (2 * n);
    let delta = (k - 1) / 2;
    let mut routes = Vec::with_capacity(g.cols);
    let mut via_search = false;
    for c in 0..g.cols {
        let route = constructive_route(k, delta, g, c);
        if route_is_correct(&route, k, delta, g, c) {
            routes.push(route);
        } else if let Some(found) = search_route(k, delta, g, c) {
            via_search = true;
            routes.push(found);
        } else {
            return Err(AccelError::UnsupportedAutomorphism { k });
        }
    }
    Ok(AutomorphismPlan { k, routes, via_search })
}

/// Apply a plan through the datapath: column read, two permutation passes,
/// column write.  Source and destination must be distinct pages.
pub fn page_automorphism(
    mem: &mut BankedMemory,
    src: u32,
    dst: u32,
    plan: &AutomorphismPlan,
) -> Result<(), AccelError> {
    assert_ne!(src, dst, "automorphism routes are not in-place");
    assert_eq!(plan.routes.len(), mem.geometry.cols);
    for (c, route) in plan.routes.iter().enumerate() {
        let lanes = mem.read_col(src, route.src_col)?;
        let unstriped = permute(&lanes, &route.read)?;
        let restriped = permute(&unstriped, &route.write)?;
        mem.write_col(dst, c, &restriped)?;
    }
    Ok(())
}
