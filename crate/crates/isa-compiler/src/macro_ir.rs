//! Macro instruction layer: one instruction per homomorphic operation.
//!
//! Lowering from the circuit inserts the modulus-management traffic the
//! programmer never writes: MODSW before multiplies at the level the noise
//! estimator picks, KSW after every multiply and automorphism, and BOOTSTRAP
//! when the remaining budget falls below the configured threshold.  Every
//! instruction carries its post-execution level and correction exponent plus
//! the circuit node it descends from.

use crate::circuit::{Circuit, CircuitOp};
use crate::error::{CompileError, Result};
use crate::estimator::{CtState, Estimator};
use crate::params::CompilerConfig;
use crate::tables::ChainTables;
use bgv_core::arith::mul_mod_u64;
use bgv_core::{
    apply_ksw, decrypt, he_add, he_plain_mul, mod_switch_to_level, BgvContext, Ciphertext,
    EvalKeys, NoiseBound,
};
use rns_ring::RnsPoly;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacroOpcode {
    Load,
    Store,
    Add,
    Mul,
    PtMul,
    Morph,
    Ksw,
    ModSw,
    Bootstrap,
}

impl MacroOpcode {
    pub fn name(self) -> &'static str {
        match self {
            MacroOpcode::Load => "LOAD",
            MacroOpcode::Store => "STORE",
            MacroOpcode::Add => "ADD",
            MacroOpcode::Mul => "MUL",
            MacroOpcode::PtMul => "PTMUL",
            MacroOpcode::Morph => "MORPH",
            MacroOpcode::Ksw => "KSW",
            MacroOpcode::ModSw => "MODSW",
            MacroOpcode::Bootstrap => "BOOTSTRAP",
        }
    }
}

/// One macro instruction.  `level` and `kappa` describe the destination
/// after the instruction runs; `parent` is the circuit node that demanded it.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroInst {
    pub opcode: MacroOpcode,
    pub dst: u32,
    pub srcs: Vec<u32>,
    pub imm: Option<u64>,
    pub level: usize,
    pub kappa: u64,
    pub parent: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacroProgram {
    pub params: bgv_core::BgvParams,
    pub insts: Vec<MacroInst>,
    /// Registers holding plaintext constants, with their coefficients.
    /// These are staged in distant memory, not computed.
    pub const_regs: Vec<(u32, Vec<i64>)>,
    pub inputs: usize,
    pub outputs: usize,
    /// Distinct rotation exponents; each needs a switching key.
    pub rotations: Vec<usize>,
}

struct Lowerer<'a> {
    circuit: &'a Circuit,
    config: &'a CompilerConfig,
    tables: &'a ChainTables,
    est: Estimator,
    insts: Vec<MacroInst>,
    vals: Vec<Option<(u32, CtState)>>,
    switched: BTreeMap<(u32, usize), (u32, CtState)>,
    const_use: BTreeMap<(u32, usize), u32>,
    const_regs: Vec<(u32, Vec<i64>)>,
    rotations: Vec<usize>,
    next_reg: u32,
}

impl<'a> Lowerer<'a> {
    fn reg(&mut self) -> u32 {
        let r = self.next_reg;
        self.next_reg += 1;
        r
    }

    fn val(&self, node: u32) -> (u32, CtState) {
        self.vals[node as usize].expect("value lowered before use")
    }

    /// Register for a constant at a particular level, shared across uses.
    fn const_at(&mut self, node: u32, level: usize) -> u32 {
        if let Some(&r) = self.const_use.get(&(node, level)) {
            return r;
        }
        let r = self.reg();
        let coeffs = match &self.circuit.node(node).op {
            CircuitOp::Const(c) => c.clone(),
            _ => unreachable!(),
        };
        self.const_use.insert((node, level), r);
        self.const_regs.push((r, coeffs));
        r
    }

    /// A plaintext constant enters the add as a transparent ciphertext:
    /// exponent one and no error term.
    fn const_state(&self, level: usize) -> CtState {
        CtState {
            level,
            noise: NoiseBound { bits: -1000.0 },
            kappa: 1,
        }
    }

    /// Value of `node` switched down to `target`, emitting MODSW on first
    /// demand and caching the result for later uses.
    fn at_level(&mut self, node: u32, target: usize, parent: u32) -> (u32, CtState) {
        let (reg, state) = self.val(node);
        if state.level == target {
            return (reg, state);
        }
        assert!(state.level > target);
        if let Some(&hit) = self.switched.get(&(node, target)) {
            return hit;
        }
        let out = self.est.after_mod_switch(&state, target, self.tables);
        let dst = self.reg();
        self.insts.push(MacroInst {
            opcode: MacroOpcode::ModSw,
            dst,
            srcs: vec![reg],
            imm: Some(target as u64),
            level: target,
            kappa: out.kappa,
            parent,
        });
        self.switched.insert((node, target), (dst, out));
        (dst, out)
    }

    fn bootstrap(&mut self, node: u32, parent: u32) {
        let (reg, _) = self.val(node);
        let dst = self.reg();
        let out = self.est.after_bootstrap(self.config.bootstrap_exit_level);
        self.insts.push(MacroInst {
            opcode: MacroOpcode::Bootstrap,
            dst,
            srcs: vec![reg],
            imm: None,
            level: out.level,
            kappa: out.kappa,
            parent,
        });
        self.vals[node as usize] = Some((dst, out));
        self.switched.retain(|&(n, _), _| n != node);
    }

    fn lower_node(&mut self, idx: u32) -> Result<()> {
        let node = self.circuit.node(idx);
        match node.op.clone() {
            CircuitOp::Input => {
                let slot = self
                    .circuit
                    .nodes
                    .iter()
                    .take(idx as usize)
                    .filter(|n| matches!(n.op, CircuitOp::Input))
                    .count() as u64;
                let dst = self.reg();
                let state = self.est.fresh(self.config.bgv.count_q);
                self.insts.push(MacroInst {
                    opcode: MacroOpcode::Load,
                    dst,
                    srcs: vec![],
                    imm: Some(slot),
                    level: state.level,
                    kappa: state.kappa,
                    parent: idx,
                });
                self.vals[idx as usize] = Some((dst, state));
            }
            CircuitOp::Const(_) => {}
            CircuitOp::Add(a, b) => {
                let (regs, state) = match (self.circuit.is_const(a), self.circuit.is_const(b)) {
                    (false, false) => {
                        let target = self.val(a).1.level.min(self.val(b).1.level);
                        let (ra, sa) = self.at_level(a, target, idx);
                        let (rb, sb) = self.at_level(b, target, idx);
                        ((ra, rb), self.est.after_add(&sa, &sb))
                    }
                    (true, false) => {
                        let (rb, sb) = self.val(b);
                        let ra = self.const_at(a, sb.level);
                        let ca = self.const_state(sb.level);
                        ((ra, rb), self.est.after_add(&ca, &sb))
                    }
                    (false, true) => {
                        let (ra, sa) = self.val(a);
                        let rb = self.const_at(b, sa.level);
                        let cb = self.const_state(sa.level);
                        ((ra, rb), self.est.after_add(&sa, &cb))
                    }
                    (true, true) => unreachable!("parser rejects const+const"),
                };
                let dst = self.reg();
                self.insts.push(MacroInst {
                    opcode: MacroOpcode::Add,
                    dst,
                    srcs: vec![regs.0, regs.1],
                    imm: None,
                    level: state.level,
                    kappa: state.kappa,
                    parent: idx,
                });
                self.vals[idx as usize] = Some((dst, state));
            }
            CircuitOp::Mul(a, b) => {
                let mut target = self.est.choose_mul_level(&self.val(a).1, &self.val(b).1);
                if target.is_none() {
                    if !self.config.bootstrap_available {
                        let (_, budget) = self.est.best_mul(&self.val(a).1, &self.val(b).1);
                        return Err(CompileError::BudgetInfeasible {
                            node: node.name.clone(),
                            bits: -budget,
                        });
                    }
                    // Recrypt the tighter operand first; the other only if
                    // the multiply still does not fit.
                    let (first, second) = if self.est.budget(&self.val(a).1)
                        <= self.est.budget(&self.val(b).1)
                    {
                        (a, b)
                    } else {
                        (b, a)
                    };
                    self.bootstrap(first, idx);
                    target = self.est.choose_mul_level(&self.val(a).1, &self.val(b).1);
                    if target.is_none() && second != first {
                        self.bootstrap(second, idx);
                        target = self.est.choose_mul_level(&self.val(a).1, &self.val(b).1);
                    }
                }
                let Some(target) = target else {
                    let (_, budget) = self.est.best_mul(&self.val(a).1, &self.val(b).1);
                    return Err(CompileError::BudgetInfeasible {
                        node: node.name.clone(),
                        bits: -budget,
                    });
                };
                let (ra, sa) = self.at_level(a, target, idx);
                let (rb, sb) = self.at_level(b, target, idx);
                let tensor_kappa = mul_mod_u64(sa.kappa, sb.kappa, self.est.t);
                let mul_dst = self.reg();
                self.insts.push(MacroInst {
                    opcode: MacroOpcode::Mul,
                    dst: mul_dst,
                    srcs: vec![ra, rb],
                    imm: None,
                    level: target,
                    kappa: tensor_kappa,
                    parent: idx,
                });
                let state = self.est.after_mul(&sa, &sb, target, self.tables);
                let dst = self.reg();
                self.insts.push(MacroInst {
                    opcode: MacroOpcode::Ksw,
                    dst,
                    srcs: vec![mul_dst],
                    imm: Some(0),
                    level: target,
                    kappa: state.kappa,
                    parent: idx,
                });
                self.vals[idx as usize] = Some((dst, state));
            }
            CircuitOp::PtMul(a, c) => {
                let (ra, sa) = self.val(a);
                let coeffs = match &self.circuit.node(c).op {
                    CircuitOp::Const(v) => v.clone(),
                    _ => unreachable!(),
                };
                let rc = self.const_at(c, sa.level);
                let l1: u64 = coeffs.iter().map(|&x| x.unsigned_abs()).sum();
                let state = self.est.after_plain_mul(&sa, l1);
                let dst = self.reg();
                self.insts.push(MacroInst {
                    opcode: MacroOpcode::PtMul,
                    dst,
                    srcs: vec![ra, rc],
                    imm: None,
                    level: state.level,
                    kappa: state.kappa,
                    parent: idx,
                });
                self.vals[idx as usize] = Some((dst, state));
            }
            CircuitOp::Rotate(a, k) => {
                let (ra, sa) = self.val(a);
                let morph_dst = self.reg();
                self.insts.push(MacroInst {
                    opcode: MacroOpcode::Morph,
                    dst: morph_dst,
                    srcs: vec![ra],
                    imm: Some(k as u64),
                    level: sa.level,
                    kappa: sa.kappa,
                    parent: idx,
                });
                let state = self.est.after_rotate(&sa);
                let dst = self.reg();
                self.insts.push(MacroInst {
                    opcode: MacroOpcode::Ksw,
                    dst,
                    srcs: vec![morph_dst],
                    imm: Some(k as u64),
                    level: state.level,
                    kappa: state.kappa,
                    parent: idx,
                });
                if !self.rotations.contains(&k) {
                    self.rotations.push(k);
                }
                self.vals[idx as usize] = Some((dst, state));
            }
        }
        Ok(())
    }
}

pub fn lower_macro(
    circuit: &Circuit,
    config: &CompilerConfig,
    tables: &ChainTables,
) -> Result<MacroProgram> {
    let est = Estimator::new(config, tables);
    let mut lw = Lowerer {
        circuit,
        config,
        tables,
        est,
        insts: Vec::new(),
        vals: vec![None; circuit.nodes.len()],
        switched: BTreeMap::new(),
        const_use: BTreeMap::new(),
        const_regs: Vec::new(),
        rotations: Vec::new(),
        next_reg: 0,
    };
    for idx in 0..circuit.nodes.len() as u32 {
        lw.lower_node(idx)?;
    }
    let inputs = circuit
        .nodes
        .iter()
        .filter(|n| matches!(n.op, CircuitOp::Input))
        .count();
    for (ord, &out) in circuit.outputs.iter().enumerate() {
        let (reg, state) = lw.val(out);
        lw.insts.push(MacroInst {
            opcode: MacroOpcode::Store,
            dst: reg,
            srcs: vec![reg],
            imm: Some(ord as u64),
            level: state.level,
            kappa: state.kappa,
            parent: out,
        });
    }
    let mut rotations = lw.rotations.clone();
    rotations.sort_unstable();
    Ok(MacroProgram {
        params: config.bgv.clone(),
        insts: lw.insts,
        const_regs: lw.const_regs,
        inputs,
        outputs: circuit.outputs.len(),
        rotations,
    })
}

impl MacroProgram {
    pub fn const_coeffs(&self, reg: u32) -> Option<&[i64]> {
        self.const_regs
            .iter()
            .find(|(r, _)| *r == reg)
            .map(|(_, c)| c.as_slice())
    }

    /// Run the program with the reference implementation.  `inputs` are
    /// indexed by input slot.  Returns the stored outputs in slot order.
    pub fn execute(
        &self,
        ctx: &BgvContext,
        keys: &EvalKeys,
        inputs: &[Ciphertext],
    ) -> Result<Vec<Ciphertext>> {
        if inputs.len() != self.inputs {
            return Err(CompileError::Exec(format!(
                "program wants {} inputs, got {}",
                self.inputs,
                inputs.len()
            )));
        }
        let mut regs: BTreeMap<u32, Ciphertext> = BTreeMap::new();
        let mut outputs: Vec<Option<Ciphertext>> = vec![None; self.outputs];
        let fetch = |regs: &BTreeMap<u32, Ciphertext>, r: u32| -> Result<Ciphertext> {
            regs.get(&r)
                .cloned()
                .ok_or_else(|| CompileError::Exec(format!("register r{r} read before write")))
        };
        for inst in &self.insts {
            match inst.opcode {
                MacroOpcode::Load => {
                    let slot = inst.imm.unwrap() as usize;
                    regs.insert(inst.dst, inputs[slot].clone());
                }
                MacroOpcode::Store => {
                    let v = fetch(&regs, inst.srcs[0])?;
                    outputs[inst.imm.unwrap() as usize] = Some(v);
                }
                MacroOpcode::Add => {
                    let lhs = self.add_operand(ctx, &regs, inst.srcs[0], inst)?;
                    let rhs = self.add_operand(ctx, &regs, inst.srcs[1], inst)?;
                    regs.insert(inst.dst, he_add(ctx, &lhs, &rhs)?);
                }
                MacroOpcode::Mul => {
                    let a = fetch(&regs, inst.srcs[0])?;
                    let b = fetch(&regs, inst.srcs[1])?;
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
                    regs.insert(
                        inst.dst,
                        Ciphertext {
                            parts: vec![c0, c1, c2],
                            level: a.level,
                            kappa: mul_mod_u64(a.kappa, b.kappa, t),
                            plain_modulus: t,
                        },
                    );
                }
                MacroOpcode::Ksw => {
                    let x = fetch(&regs, inst.srcs[0])?;
                    let exp = inst.imm.unwrap() as usize;
                    let out = if exp == 0 {
                        let (d0, d1) = apply_ksw(ctx, &keys.relin, &x.parts[2], x.level)?;
                        let mut p0 = x.parts[0].clone();
                        p0.add_assign(&d0)?;
                        let mut p1 = x.parts[1].clone();
                        p1.add_assign(&d1)?;
                        Ciphertext {
                            parts: vec![p0, p1],
                            ..x
                        }
                    } else {
                        let key = keys.rotation(exp).ok_or_else(|| {
                            CompileError::Exec(format!("no rotation key for exponent {exp}"))
                        })?;
                        let (d0, d1) = apply_ksw(ctx, key, &x.parts[1], x.level)?;
                        let mut p0 = x.parts[0].clone();
                        p0.add_assign(&d0)?;
                        Ciphertext {
                            parts: vec![p0, d1],
                            ..x
                        }
                    };
                    regs.insert(inst.dst, out);
                }
                MacroOpcode::ModSw => {
                    let x = fetch(&regs, inst.srcs[0])?;
                    let out = mod_switch_to_level(ctx, &x, inst.imm.unwrap() as usize)?;
                    regs.insert(inst.dst, out);
                }
                MacroOpcode::PtMul => {
                    let x = fetch(&regs, inst.srcs[0])?;
                    let coeffs = self.const_coeffs(inst.srcs[1]).ok_or_else(|| {
                        CompileError::Exec(format!("r{} is not a constant", inst.srcs[1]))
                    })?;
                    regs.insert(inst.dst, he_plain_mul(ctx, &x, coeffs)?);
                }
                MacroOpcode::Morph => {
                    let x = fetch(&regs, inst.srcs[0])?;
                    let k = inst.imm.unwrap() as usize;
                    let parts = x
                        .parts
                        .iter()
                        .map(|p| p.automorphism(k))
                        .collect::<std::result::Result<Vec<RnsPoly>, _>>()?;
                    regs.insert(inst.dst, Ciphertext { parts, ..x });
                }
                MacroOpcode::Bootstrap => {
                    return Err(CompileError::Exec(
                        "recryption is not executable in this profile".into(),
                    ));
                }
            }
        }
        outputs
            .into_iter()
            .map(|o| o.ok_or_else(|| CompileError::Exec("missing output".into())))
            .collect()
    }

    /// Transparent ciphertext for a constant register, at the level the
    /// instruction annotation demands.
    fn add_operand(
        &self,
        ctx: &BgvContext,
        regs: &BTreeMap<u32, Ciphertext>,
        reg: u32,
        inst: &MacroInst,
    ) -> Result<Ciphertext> {
        if let Some(ct) = regs.get(&reg) {
            return Ok(ct.clone());
        }
        let coeffs = self
            .const_coeffs(reg)
            .ok_or_else(|| CompileError::Exec(format!("register r{reg} read before write")))?;
        let primes = ctx.active_primes(inst.level);
        let m = ctx.ring.to_eval(&RnsPoly::from_int_coeffs(primes, coeffs));
        let zero = bgv_core::keys::zero_rns(primes);
        Ok(Ciphertext {
            parts: vec![m, zero],
            level: inst.level,
            kappa: 1,
            plain_modulus: ctx.params.plain_modulus,
        })
    }

    /// Decrypt `ct` and compare against plaintext coefficients; used by
    /// equivalence tests.
    pub fn check_decrypts_to(
        ctx: &BgvContext,
        sk: &bgv_core::SecretKey,
        ct: &Ciphertext,
        expect: &[i64],
    ) -> Result<()> {
        let got = decrypt(ctx, sk, ct)?;
        if got.message != expect {
            return Err(CompileError::Exec(format!(
                "decryption mismatch: got {:?}, want {:?}",
                &got.message[..got.message.len().min(8)],
                &expect[..expect.len().min(8)]
            )));
        }
        Ok(())
    }
}
