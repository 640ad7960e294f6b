//! Precomputed plaintext data for the rounding circuit: automorphism
//! lists, masks for the two slot/coefficient transforms, and the digit
//! polynomial tables.  Building everything once up front keeps the hot
//! path free of modular linear algebra and lets the result be cached on
//! disk between runs.

use crate::digits::digit_poly;
use crate::error::BootstrapError;
use crate::params::BootstrapParams;
use bgv_core::arith::{centered_u64, inv_mod_u64, mul_mod_u64, pow_mod_u64};
use bgv_core::Packing;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};

const MAGIC: u32 = 0x5243_5231;
const VERSION: u32 = 1;

/// Everything the bootstrap needs besides keys: the slot-to-coefficient
/// masks at the input precision, the trace and coset automorphism lists,
/// the inverse-Vandermonde masks at the working precision, and one digit
/// polynomial per extraction step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundingCircuit {
    pub p: u64,
    pub r: u32,
    pub e: u32,
    pub n_log: u32,
    pub d: u64,
    pub ell: u64,
    pub s2c_autos: Vec<usize>,
    pub s2c_masks: Vec<Vec<i64>>,
    pub trace_autos: Vec<usize>,
    pub c2s_autos: Vec<usize>,
    pub c2s_masks: Vec<Vec<i64>>,
    /// (precision j, coefficients of the digit polynomial), j descending
    /// from e to r + 1.
    pub digit_tables: Vec<(u32, Vec<i64>)>,
}

fn check(cancel: &AtomicBool) -> Result<(), BootstrapError> {
    if cancel.load(Ordering::Relaxed) {
        Err(BootstrapError::Cancelled)
    } else {
        Ok(())
    }
}

/// Gauss-Jordan inverse mod m = p^e.  Every pivot candidate difference of
/// distinct roots is a unit mod p, so elimination never stalls.
fn invert_matrix_mod(mat: &[Vec<u64>], m: u64, p: u64) -> Vec<Vec<u64>> {
    let n = mat.len();
    let mut a: Vec<Vec<u64>> = mat.iter().map(|row| row.to_vec()).collect();
    let mut inv: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| a[r][col] % p != 0)
            .expect("Vandermonde of roots distinct mod p is invertible");
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let scale = inv_mod_u64(a[col][col], m).expect("pivot is a unit");
        for j in 0..n {
            a[col][j] = mul_mod_u64(a[col][j], scale, m);
            inv[col][j] = mul_mod_u64(inv[col][j], scale, m);
        }
        for r in 0..n {
            if r == col || a[r][col] == 0 {
                continue;
            }
            let f = a[r][col];
            for j in 0..n {
                a[r][j] = (a[r][j] + m - mul_mod_u64(f, a[col][j], m)) % m;
                inv[r][j] = (inv[r][j] + m - mul_mod_u64(f, inv[col][j], m)) % m;
            }
        }
    }
    inv
}

impl RoundingCircuit {
    pub fn build(
        packing: &Packing,
        params: &BootstrapParams,
        cancel: &AtomicBool,
    ) -> Result<Self, BootstrapError> {
        assert_eq!(packing.p, params.p);
        assert!(packing.e_max >= params.e);
        let ell = packing.ell;
        let autos = packing.exponents.clone();

        check(cancel)?;
        // Slots to coefficients: sum_g mask_g * phi_g(x) realizes the
        // Vandermonde map slot_i -> sum_u rho_i^u v_u, so mask_g carries
        // rho_i^{perm_g(i)} in slot i at the input precision.
        let mr = packing.modulus(params.r);
        let mut s2c_masks = Vec::with_capacity(ell);
        for &g in &autos {
            let perm = packing.slot_perm(g)?;
            let vals: Vec<i64> = (0..ell)
                .map(|i| {
                    let rho = packing.root(i, params.r);
                    centered_u64(pow_mod_u64(rho, perm[i] as u64, mr), mr)
                })
                .collect();
            s2c_masks.push(packing.thin_encode(&vals, params.r)?);
        }

        check(cancel)?;
        // Trace down to the slot constants: compose x -> x + phi_k(x) for
        // k = p^(2^s), s < log2(d).  Each k fixes slot positions because
        // p = 1 mod 2*ell.
        let two_n = 2 * packing.n();
        let mut trace_autos = Vec::new();
        let mut k = params.p as usize % two_n;
        let mut span = 1usize;
        while span < packing.d {
            trace_autos.push(k);
            k = k * k % two_n;
            span *= 2;
        }

        check(cancel)?;
        // Coefficients to slots: after the trace, slot i holds
        // d * sum_u w_{ud} rho_i^u, so apply (1/d) V^(-1) slot-wise.
        let me = packing.modulus(params.e);
        let vand: Vec<Vec<u64>> = (0..ell)
            .map(|i| {
                let rho = packing.root(i, params.e);
                (0..ell as u64).map(|u| pow_mod_u64(rho, u, me)).collect()
            })
            .collect();
        let mut a = invert_matrix_mod(&vand, me, params.p);
        let d_inv = inv_mod_u64(packing.d as u64 % me, me).expect("d is a power of two, p odd");
        for row in a.iter_mut() {
            for v in row.iter_mut() {
                *v = mul_mod_u64(*v, d_inv, me);
            }
        }
        let mut c2s_masks = Vec::with_capacity(ell);
        for &g in &autos {
            let perm = packing.slot_perm(g)?;
            let vals: Vec<i64> = (0..ell).map(|i| centered_u64(a[i][perm[i]], me)).collect();
            c2s_masks.push(packing.thin_encode(&vals, params.e)?);
        }

        check(cancel)?;
        let digit_tables: Vec<(u32, Vec<i64>)> = (params.r + 1..=params.e)
            .rev()
            .map(|j| (j, digit_poly(params.p, j)))
            .collect();

        Ok(RoundingCircuit {
            p: params.p,
            r: params.r,
            e: params.e,
            n_log: packing.n_log,
            d: packing.d as u64,
            ell: ell as u64,
            s2c_autos: autos.clone(),
            s2c_masks,
            trace_autos,
            c2s_autos: autos,
            c2s_masks,
            digit_tables,
        })
    }

    /// Automorphism indices the slots-to-coeffs stage needs keys for.
    pub fn base_automorphisms(&self) -> Vec<usize> {
        self.s2c_autos.iter().copied().filter(|&k| k != 1).collect()
    }

    /// Automorphism indices the trace and coeffs-to-slots stages need.
    pub fn work_automorphisms(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .trace_autos
            .iter()
            .chain(self.c2s_autos.iter())
            .copied()
            .filter(|&k| k != 1)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn matches(&self, packing: &Packing, params: &BootstrapParams) -> bool {
        self.p == params.p
            && self.r == params.r
            && self.e == params.e
            && self.n_log == packing.n_log
            && self.d == packing.d as u64
            && self.ell == packing.ell as u64
    }

    pub fn save(&self, path: &Path) -> Result<(), BootstrapError> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&MAGIC.to_le_bytes())?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&self.p.to_le_bytes())?;
        w.write_all(&self.r.to_le_bytes())?;
        w.write_all(&self.e.to_le_bytes())?;
        w.write_all(&self.n_log.to_le_bytes())?;
        w.write_all(&self.d.to_le_bytes())?;
        w.write_all(&self.ell.to_le_bytes())?;
        write_usize_vec(&mut w, &self.s2c_autos)?;
        write_vec_of_vecs(&mut w, &self.s2c_masks)?;
        write_usize_vec(&mut w, &self.trace_autos)?;
        write_usize_vec(&mut w, &self.c2s_autos)?;
        write_vec_of_vecs(&mut w, &self.c2s_masks)?;
        w.write_all(&(self.digit_tables.len() as u64).to_le_bytes())?;
        for (j, table) in &self.digit_tables {
            w.write_all(&j.to_le_bytes())?;
            write_i64_vec(&mut w, table)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, BootstrapError> {
        let mut r = BufReader::new(File::open(path)?);
        if read_u32(&mut r)? != MAGIC || read_u32(&mut r)? != VERSION {
            return Err(BootstrapError::CacheFormat);
        }
        let p = read_u64(&mut r)?;
        let prec_r = read_u32(&mut r)?;
        let e = read_u32(&mut r)?;
        let n_log = read_u32(&mut r)?;
        let d = read_u64(&mut r)?;
        let ell = read_u64(&mut r)?;
        let s2c_autos = read_usize_vec(&mut r)?;
        let s2c_masks = read_vec_of_vecs(&mut r)?;
        let trace_autos = read_usize_vec(&mut r)?;
        let c2s_autos = read_usize_vec(&mut r)?;
        let c2s_masks = read_vec_of_vecs(&mut r)?;
        let count = read_u64(&mut r)? as usize;
        let mut digit_tables = Vec::with_capacity(count);
        for _ in 0..count {
            let j = read_u32(&mut r)?;
            digit_tables.push((j, read_i64_vec(&mut r)?));
        }
        Ok(RoundingCircuit {
            p,
            r: prec_r,
            e,
            n_log,
            d,
            ell,
            s2c_autos,
            s2c_masks,
            trace_autos,
            c2s_autos,
            c2s_masks,
            digit_tables,
        })
    }

    /// Use a cached circuit when the file exists and matches the
    /// parameters; otherwise build and overwrite the cache.
    pub fn load_or_build(
        path: &Path,
        packing: &Packing,
        params: &BootstrapParams,
        cancel: &AtomicBool,
    ) -> Result<Self, BootstrapError> {
        if path.exists() {
            if let Ok(cached) = Self::load(path) {
                if cached.matches(packing, params) {
                    return Ok(cached);
                }
            }
        }
        let built = Self::build(packing, params, cancel)?;
        built.save(path)?;
        Ok(built)
    }
}

fn read_u32(r: &mut impl Read) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> std::io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_i64(r: &mut impl Read) -> std::io::Result<i64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(i64::from_le_bytes(b))
}

fn write_i64_vec(w: &mut impl Write, v: &[i64]) -> std::io::Result<()> {
    w.write_all(&(v.len() as u64).to_le_bytes())?;
    for &x in v {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn read_i64_vec(r: &mut impl Read) -> std::io::Result<Vec<i64>> {
    let len = read_u64(r)? as usize;
    (0..len).map(|_| read_i64(r)).collect()
}

fn write_usize_vec(w: &mut impl Write, v: &[usize]) -> std::io::Result<()> {
    w.write_all(&(v.len() as u64).to_le_bytes())?;
    for &x in v {
        w.write_all(&(x as u64).to_le_bytes())?;
    }
    Ok(())
}

fn read_usize_vec(r: &mut impl Read) -> std::io::Result<Vec<usize>> {
    let len = read_u64(r)? as usize;
    (0..len).map(|_| read_u64(r).map(|x| x as usize)).collect()
}

fn write_vec_of_vecs(w: &mut impl Write, v: &[Vec<i64>]) -> std::io::Result<()> {
    w.write_all(&(v.len() as u64).to_le_bytes())?;
    for inner in v {
        write_i64_vec(w, inner)?;
    }
    Ok(())
}

fn read_vec_of_vecs(r: &mut impl Read) -> std::io::Result<Vec<Vec<i64>>> {
    let len = read_u64(r)? as usize;
    (0..len).map(|_| read_i64_vec(r)).collect()
}
