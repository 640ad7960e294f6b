//! Reference interpreter for the mid-level IR, plus the builder that turns
//! real ciphertexts and keys into the distant-memory image a lowered program
//! reads.  Every arithmetic step mirrors the reference library formula for
//! the same operation, so interpreting a lowered program reproduces the
//! library result bit for bit.

use crate::error::{CompileError, Result};
use crate::macro_ir::{MacroOpcode, MacroProgram};
use crate::mid_ir::{DistantKind, MidOpcode, MidProgram};
use crate::tables::{ChainTables, PrimeSel};
use bgv_core::{BgvContext, Ciphertext, EvalKeys};
use rns_ring::mont::{centered_rem, mul_mod_u32, to_centered, to_unsigned};
use rns_ring::poly::ResiduePoly;
use rns_ring::{intt_direct, ntt_direct, Domain, NttPrime, RingContext, RnsPoly};
use std::collections::BTreeMap;

/// Values for every distant slot a functional run needs: program inputs,
/// plaintext constants and switching-key rows.  Key pages are pre-scaled
/// into Montgomery form when the manifest says so.
pub fn build_distant_polys(
    mid: &MidProgram,
    prog: &MacroProgram,
    ctx: &BgvContext,
    keys: &EvalKeys,
    inputs: &[Ciphertext],
) -> Result<BTreeMap<u64, ResiduePoly>> {
    let mut image = BTreeMap::new();
    for (slot, d) in mid.distant.iter().enumerate() {
        if d.synth {
            continue;
        }
        let q = match d.prime {
            PrimeSel::Q(i) => ctx.chain.q_primes[i as usize],
            PrimeSel::P(i) => ctx.chain.p_primes[i as usize],
        };
        let poly = match &d.kind {
            DistantKind::Input { input, part } => {
                let ct = inputs.get(*input as usize).ok_or_else(|| {
                    CompileError::Exec(format!("missing input {input}"))
                })?;
                ct.parts[*part as usize]
                    .residue_for(q.q)
                    .ok_or_else(|| {
                        CompileError::Exec(format!("input {input} lacks residue {}", q.q))
                    })?
                    .clone()
            }
            DistantKind::Const { reg } => {
                let coeffs = prog.const_coeffs(*reg).ok_or_else(|| {
                    CompileError::Exec(format!("r{reg} is not a constant"))
                })?;
                let rp = RnsPoly::from_int_coeffs(&[q], coeffs);
                ntt_direct(&rp.residues[0], ctx.ring.table(q.q))
            }
            DistantKind::KskRow { key, row, part } => {
                let ksw = if *key == 0 {
                    &keys.relin
                } else {
                    keys.rotation(*key as usize).ok_or_else(|| {
                        CompileError::Exec(format!("no rotation key {key}"))
                    })?
                };
                let r = ksw.rows.get(*row as usize).ok_or_else(|| {
                    CompileError::Exec(format!("key {key} lacks row {row}"))
                })?;
                let col = if *part == 0 { &r.b } else { &r.a };
                let mut poly = col
                    .residue_for(q.q)
                    .ok_or_else(|| {
                        CompileError::Exec(format!("key row lacks residue {}", q.q))
                    })?
                    .clone();
                if d.mont {
                    for c in poly.coeffs.iter_mut() {
                        *c = to_centered(q.to_mont(to_unsigned(*c, q.q)), q.q);
                    }
                }
                poly
            }
            DistantKind::Output { .. } | DistantKind::Spill { .. } => continue,
        };
        image.insert(slot as u64, poly);
    }
    Ok(image)
}

/// Execute a mid program over residue polynomials.  Returns the polynomials
/// written by STORE, keyed by distant slot.
pub fn run_mid(
    mid: &MidProgram,
    tables: &ChainTables,
    distant: &BTreeMap<u64, ResiduePoly>,
) -> Result<BTreeMap<u64, ResiduePoly>> {
    let all: Vec<NttPrime> = tables.chain.all_primes().copied().collect();
    let ring = RingContext::new(&all);
    let mut pages: Vec<Option<ResiduePoly>> = vec![None; mid.pages.len()];
    let mut stores = BTreeMap::new();
    let fetch = |pages: &[Option<ResiduePoly>], p: u32| -> Result<ResiduePoly> {
        pages[p as usize]
            .clone()
            .ok_or_else(|| CompileError::Exec(format!("page {p} read before write")))
    };
    for inst in &mid.insts {
        let q = tables.prime(inst.prime);
        let out = match inst.opcode {
            MidOpcode::Load => {
                if inst.imms[1] != 0 {
                    return Err(CompileError::Exec(
                        "synthesized key page in a functional run".into(),
                    ));
                }
                let slot = inst.imms[0];
                let v = stores
                    .get(&slot)
                    .or_else(|| distant.get(&slot))
                    .cloned()
                    .ok_or_else(|| {
                        CompileError::Exec(format!("no distant data for slot {slot}"))
                    })?;
                Some(v)
            }
            MidOpcode::Store => {
                let v = fetch(&pages, inst.srcs[0])?;
                stores.insert(inst.imms[0], v);
                None
            }
            MidOpcode::Add => {
                let mut a = fetch(&pages, inst.srcs[0])?;
                a.add_assign(&fetch(&pages, inst.srcs[1])?)?;
                Some(a)
            }
            MidOpcode::Mul => {
                let mut a = fetch(&pages, inst.srcs[0])?;
                a.pointwise_mul_assign(&fetch(&pages, inst.srcs[1])?)?;
                Some(a)
            }
            MidOpcode::Macl => {
                let acc = fetch(&pages, inst.srcs[0])?;
                let mut prod = fetch(&pages, inst.srcs[1])?;
                prod.pointwise_mul_assign(&fetch(&pages, inst.srcs[2])?)?;
                prod.add_assign(&acc)?;
                Some(prod)
            }
            MidOpcode::Muli => {
                let src = fetch(&pages, inst.srcs[0])?;
                let c = inst.imms[0];
                assert!(c < q.q as u64);
                let coeffs = src
                    .coeffs
                    .iter()
                    .map(|&v| {
                        let std = v.rem_euclid(q.q as i64) as u32;
                        to_centered(mul_mod_u32(std, c as u32, q.q), q.q)
                    })
                    .collect();
                Some(ResiduePoly::from_coeffs(*q, src.domain, coeffs))
            }
            MidOpcode::Ntt => {
                let src = fetch(&pages, inst.srcs[0])?;
                Some(ntt_direct(&src, ring.table(q.q)))
            }
            MidOpcode::Intt => {
                let src = fetch(&pages, inst.srcs[0])?;
                Some(intt_direct(&src, ring.table(q.q)))
            }
            MidOpcode::Auto => {
                let src = fetch(&pages, inst.srcs[0])?;
                Some(src.automorphism_eval(inst.imms[0] as usize)?)
            }
            MidOpcode::Fbe => {
                let weights: Vec<u64> = tables
                    .punctured_mod(&inst.src_primes, inst.prime)
                    .into_iter()
                    .collect();
                let srcs: Vec<ResiduePoly> = inst
                    .srcs
                    .iter()
                    .map(|&p| fetch(&pages, p))
                    .collect::<Result<_>>()?;
                let n = srcs[0].n();
                let mut coeffs = Vec::with_capacity(n);
                for i in 0..n {
                    let mut acc = 0u64;
                    for (s, &w) in srcs.iter().zip(&weights) {
                        let y = s.coeffs[i].rem_euclid(q.q as i64) as u32;
                        acc = (acc + mul_mod_u32(y, w as u32, q.q) as u64) % q.q as u64;
                    }
                    coeffs.push(to_centered(acc as u32, q.q));
                }
                Some(ResiduePoly::from_coeffs(*q, Domain::Coefficient, coeffs))
            }
            MidOpcode::Smr => {
                let a = fetch(&pages, inst.srcs[0])?;
                let b = fetch(&pages, inst.srcs[1])?;
                let t_like = inst.imms[0] as i128;
                let scale = inst.imms[1] as i128;
                let coeffs = a
                    .coeffs
                    .iter()
                    .zip(&b.coeffs)
                    .map(|(&x, &y)| {
                        let num = centered_rem(x as i128 - t_like * y as i128, q.q as u64);
                        centered_rem(num as i128 * scale, q.q as u64)
                    })
                    .collect();
                Some(ResiduePoly::from_coeffs(*q, a.domain, coeffs))
            }
        };
        if let Some(poly) = out {
            pages[inst.dst as usize] = Some(poly);
        }
    }
    Ok(stores)
}

/// Reassemble stored output pages into ciphertexts, using the macro store
/// annotations for level and exponent.
pub fn assemble_outputs(
    mid: &MidProgram,
    prog: &MacroProgram,
    tables: &ChainTables,
    stores: &BTreeMap<u64, ResiduePoly>,
) -> Result<Vec<Ciphertext>> {
    let slot_map: BTreeMap<(u32, u8, usize), u64> = mid
        .output_slots()
        .into_iter()
        .map(|(out, part, prime, slot)| ((out, part, prime.flat(tables.count_q)), slot))
        .collect();
    let mut outs = Vec::new();
    for ord in 0..prog.outputs as u32 {
        let store = prog
            .insts
            .iter()
            .find(|i| i.opcode == MacroOpcode::Store && i.imm == Some(ord as u64))
            .ok_or_else(|| CompileError::Exec(format!("no store for output {ord}")))?;
        let level = store.level;
        let mut parts = Vec::new();
        for part in 0..2u8 {
            let residues = tables
                .active(level)
                .iter()
                .map(|&sel| {
                    let slot = slot_map
                        .get(&(ord, part, sel.flat(tables.count_q)))
                        .ok_or_else(|| {
                            CompileError::Exec(format!(
                                "missing output slot {ord}/{part}/{sel:?}"
                            ))
                        })?;
                    stores.get(slot).cloned().ok_or_else(|| {
                        CompileError::Exec(format!("slot {slot} never stored"))
                    })
                })
                .collect::<Result<Vec<ResiduePoly>>>()?;
            parts.push(RnsPoly { residues });
        }
        outs.push(Ciphertext {
            parts,
            level,
            kappa: store.kappa,
            plain_modulus: prog.params.plain_modulus,
        });
    }
    Ok(outs)
}
