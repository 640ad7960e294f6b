//! In-order list scheduling and scratchpad allocation.
//!
//! Scheduling reorders mid instructions inside a fixed lookahead window so
//! that independent work lands on different processing elements.  Allocation
//! then rewrites the virtual page names to physical scratchpad pages under a
//! least-recently-used policy, inserting loads and spill stores where the
//! working set does not fit.

use crate::error::{CompileError, Result};
use crate::mid_ir::{DistantKind, DistantPage, MidInst, MidOpcode, MidProgram, PageInfo};
use crate::params::CompilerConfig;
use accel_model::MAC_LANES;
use std::collections::BTreeMap;

/// Processing element a mid instruction occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pe {
    Ntt,
    Perm,
    Mac,
    Ctb,
}

fn pe_of(op: MidOpcode) -> Pe {
    match op {
        MidOpcode::Ntt | MidOpcode::Intt => Pe::Ntt,
        MidOpcode::Auto => Pe::Perm,
        MidOpcode::Load | MidOpcode::Store => Pe::Ctb,
        _ => Pe::Mac,
    }
}

/// Rough occupancy in micro cycles, used only to order ready instructions.
fn cost_of(inst: &MidInst, n: usize) -> u64 {
    let chunks = (n / MAC_LANES).max(1) as u64;
    let rows = (1usize << (n.trailing_zeros() / 2)) as u64;
    match inst.opcode {
        MidOpcode::Ntt | MidOpcode::Intt => 2 * rows * 3,
        MidOpcode::Auto => 2 * rows * 3,
        MidOpcode::Load | MidOpcode::Store => chunks * 6,
        MidOpcode::Mul | MidOpcode::Macl => 5 * chunks * 4,
        MidOpcode::Muli | MidOpcode::Add => 3 * chunks * 4,
        MidOpcode::Smr => 4 * chunks * 4,
        MidOpcode::Fbe => (inst.srcs.len() as u64 + 2) * chunks * 4,
    }
}

/// One schedulable unit: a single instruction, or a whole fragment-extension
/// group that the micro expansion will interleave chunk by chunk.
struct Unit {
    members: Vec<usize>,
    pe: Pe,
    cost: u64,
}

fn build_units(insts: &[MidInst]) -> Vec<Unit> {
    let mut units: Vec<Unit> = Vec::new();
    let mut open: Option<u32> = None;
    for (i, inst) in insts.iter().enumerate() {
        let grouped = inst.group != 0;
        if grouped && open == Some(inst.group) {
            units.last_mut().unwrap().members.push(i);
        } else {
            units.push(Unit {
                members: vec![i],
                pe: pe_of(inst.opcode),
                cost: 0,
            });
            open = if grouped { Some(inst.group) } else { None };
        }
    }
    units
}

/// Reorder instructions with an in-order list scheduler: at each step the
/// ready unit with the earliest estimated issue time among the first
/// `window` pending units is emitted.  Groups move as one unit, so their
/// members stay contiguous.
pub fn schedule(mid: &MidProgram, config: &CompilerConfig) -> MidProgram {
    let n = config.n();
    let insts = &mid.insts;
    let mut units = build_units(insts);
    for u in units.iter_mut() {
        u.cost = u.members.iter().map(|&i| cost_of(&insts[i], n)).sum();
        u.pe = pe_of(insts[u.members[0]].opcode);
    }
    let mut writer: BTreeMap<u32, usize> = BTreeMap::new();
    let mut deps: Vec<Vec<usize>> = vec![Vec::new(); units.len()];
    for (ui, u) in units.iter().enumerate() {
        for &i in &u.members {
            for &s in &insts[i].srcs {
                if let Some(&w) = writer.get(&s) {
                    if w != ui && !deps[ui].contains(&w) {
                        deps[ui].push(w);
                    }
                }
            }
            if let Some(d) = insts[i].written_page() {
                writer.insert(d, ui);
            }
        }
        let _ = unit_of_inst;
    }

    let mut done = vec![false; units.len()];
    let mut finish = vec![0u64; units.len()];
    let mut pe_free: BTreeMap<u8, u64> = BTreeMap::new();
    let mut pending: Vec<usize> = (0..units.len()).collect();
    let mut order: Vec<usize> = Vec::with_capacity(units.len());
    while !pending.is_empty() {
        let horizon = pending.len().min(config.window);
        let mut best: Option<(u64, usize, usize)> = None;
        for (pos, &ui) in pending[..horizon].iter().enumerate() {
            if !deps[ui].iter().all(|&d| done[d]) {
                continue;
            }
            let pe_key = units[ui].pe as u8;
            let ready = deps[ui].iter().map(|&d| finish[d]).max().unwrap_or(0);
            let start = ready.max(*pe_free.get(&pe_key).unwrap_or(&0));
            if best.map_or(true, |(s, _, _)| start < s) {
                best = Some((start, pos, ui));
            }
        }
        let (start, pos, ui) = best.expect("first pending unit is always ready");
        pending.remove(pos);
        done[ui] = true;
        finish[ui] = start + units[ui].cost;
        pe_free.insert(units[ui].pe as u8, finish[ui]);
        order.push(ui);
    }

    let mut out = mid.clone();
    out.insts = order
        .iter()
        .flat_map(|&ui| units[ui].members.iter().map(|&i| insts[i].clone()))
        .collect();
    out
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AllocStats {
    pub spill_stores: usize,
    pub reloads: usize,
    /// Loads elided because the profile declares operands resident.
    pub elided_loads: usize,
}

struct Resident {
    vpage: u32,
    dirty: bool,
    /// Distant slot holding a clean copy, if any.
    origin: Option<u64>,
    last_touch: u64,
}

struct Allocator<'a> {
    config: &'a CompilerConfig,
    /// Physical page state, indexed by page id; the last page is reserved
    /// as transform scratch and never allocated.
    slots: Vec<Option<Resident>>,
    /// Virtual page -> physical page, for resident pages.
    bound: BTreeMap<u32, u32>,
    /// Virtual page -> spill or origin slot for pages currently off chip.
    parked: BTreeMap<u32, u64>,
    uses_left: Vec<u32>,
    virt_pages: Vec<PageInfo>,
    distant: Vec<DistantPage>,
    out: Vec<MidInst>,
    clock: u64,
    stats: AllocStats,
}

impl<'a> Allocator<'a> {
    fn capacity(&self) -> usize {
        self.config.ctb_pages - 1
    }

    fn touch(&mut self, ppage: u32) {
        self.clock += 1;
        let clock = self.clock;
        self.slots[ppage as usize].as_mut().unwrap().last_touch = clock;
    }

    fn resident_kept(&self, slot: u64) -> bool {
        self.config.inputs_resident
            && matches!(
                self.distant[slot as usize].kind,
                DistantKind::Input { .. } | DistantKind::Const { .. } | DistantKind::KskRow { .. }
            )
    }

    /// Find a free physical page, spilling the least recently used page if
    /// none is free.  `pinned` pages back the instruction being placed.
    fn grab(&mut self, pinned: &[u32], parent: u32) -> Result<u32> {
        if let Some(free) = (0..self.capacity()).find(|&p| self.slots[p].is_none()) {
            return Ok(free as u32);
        }
        let victim = (0..self.capacity() as u32)
            .filter(|p| !pinned.contains(p))
            .min_by_key(|&p| (self.slots[p as usize].as_ref().unwrap().last_touch, p))
            .ok_or(CompileError::CapacityTooSmall {
                need: pinned.len() + 1,
                have: self.capacity(),
            })?;
        let r = self.slots[victim as usize].take().unwrap();
        self.bound.remove(&r.vpage);
        if r.dirty {
            let slot = self.new_slot(DistantPage {
                kind: DistantKind::Spill { page: r.vpage },
                prime: self.virt_pages[r.vpage as usize].prime,
                domain: self.virt_pages[r.vpage as usize].domain,
                mont: false,
                synth: false,
            })?;
            self.out.push(MidInst {
                opcode: MidOpcode::Store,
                dst: victim,
                srcs: vec![victim],
                prime: self.virt_pages[r.vpage as usize].prime,
                src_primes: Vec::new(),
                imms: vec![slot],
                group: 0,
                parent,
            });
            self.parked.insert(r.vpage, slot);
            self.stats.spill_stores += 1;
        } else if let Some(origin) = r.origin {
            self.parked.insert(r.vpage, origin);
        }
        Ok(victim)
    }

    fn new_slot(&mut self, page: DistantPage) -> Result<u64> {
        if self.distant.len() >= self.config.distant_pages {
            return Err(CompileError::DistantOverflow {
                need: self.distant.len() + 1,
                have: self.config.distant_pages,
            });
        }
        self.distant.push(page);
        Ok((self.distant.len() - 1) as u64)
    }

    /// Bring a parked virtual page back on chip.
    fn reload(&mut self, vpage: u32, pinned: &[u32], parent: u32) -> Result<u32> {
        let slot = *self.parked.get(&vpage).ok_or_else(|| {
            CompileError::Exec(format!("virtual page {vpage} used before defined"))
        })?;
        let p = self.grab(pinned, parent)?;
        if self.resident_kept(slot) {
            self.stats.elided_loads += 1;
        } else {
            self.out.push(MidInst {
                opcode: MidOpcode::Load,
                dst: p,
                srcs: Vec::new(),
                prime: self.virt_pages[vpage as usize].prime,
                src_primes: Vec::new(),
                imms: vec![slot, self.distant[slot as usize].synth as u64],
                group: 0,
                parent,
            });
            self.stats.reloads += 1;
        }
        self.slots[p as usize] = Some(Resident {
            vpage,
            dirty: false,
            origin: Some(slot),
            last_touch: 0,
        });
        self.bound.insert(vpage, p);
        self.parked.remove(&vpage);
        self.touch(p);
        Ok(p)
    }

    fn release_dead(&mut self, vpage: u32) {
        if self.uses_left[vpage as usize] == 0 {
            if let Some(p) = self.bound.remove(&vpage) {
                self.slots[p as usize] = None;
            }
            self.parked.remove(&vpage);
        }
    }
}

/// Rewrite a scheduled program onto physical scratchpad pages.  Register
/// file only pages keep private ids past the scratchpad range; everything
/// else is bound to pages `0 .. ctb_pages - 1` with LRU spilling.
pub fn allocate(mid: &MidProgram, config: &CompilerConfig) -> Result<(MidProgram, AllocStats)> {
    let cap = config.ctb_pages - 1;
    let mut alloc = Allocator {
        config,
        slots: (0..cap).map(|_| None).collect(),
        bound: BTreeMap::new(),
        parked: BTreeMap::new(),
        uses_left: vec![0; mid.pages.len()],
        virt_pages: mid.pages.clone(),
        distant: mid.distant.clone(),
        out: Vec::with_capacity(mid.insts.len()),
        clock: 0,
        stats: AllocStats::default(),
    };
    for inst in &mid.insts {
        for &s in &inst.srcs {
            alloc.uses_left[s as usize] += 1;
        }
    }

    let mut rf_map: BTreeMap<u32, u32> = BTreeMap::new();
    let mut next_rf = config.ctb_pages as u32;
    let mut rf_pages: Vec<PageInfo> = Vec::new();

    let units = build_units(&mid.insts);
    for unit in &units {
        let parent = mid.insts[unit.members[0]].parent;
        let mut pinned: Vec<u32> = Vec::new();
        for &i in &unit.members {
            for &s in &mid.insts[i].srcs {
                if mid.pages[s as usize].rf_only {
                    continue;
                }
                if let Some(&p) = alloc.bound.get(&s) {
                    if !pinned.contains(&p) {
                        pinned.push(p);
                    }
                }
            }
        }
        for &i in &unit.members {
            let srcs = mid.insts[i].srcs.clone();
            for &s in &srcs {
                if mid.pages[s as usize].rf_only || alloc.bound.contains_key(&s) {
                    continue;
                }
                let p = alloc.reload(s, &pinned, parent)?;
                pinned.push(p);
            }
        }
        let mut dst_of: BTreeMap<usize, u32> = BTreeMap::new();
        for &i in &unit.members {
            let inst = &mid.insts[i];
            let Some(d) = inst.written_page() else {
                continue;
            };
            if mid.pages[d as usize].rf_only {
                let id = *rf_map.entry(d).or_insert_with(|| {
                    let id = next_rf;
                    next_rf += 1;
                    rf_pages.push(mid.pages[d as usize]);
                    id
                });
                dst_of.insert(i, id);
                continue;
            }
            let p = if inst.opcode == MidOpcode::Load && alloc.resident_kept(inst.imms[0]) {
                let p = alloc.grab(&pinned, parent)?;
                alloc.stats.elided_loads += 1;
                p
            } else {
                alloc.grab(&pinned, parent)?
            };
            alloc.slots[p as usize] = Some(Resident {
                vpage: d,
                dirty: inst.opcode != MidOpcode::Load,
                origin: if inst.opcode == MidOpcode::Load {
                    Some(inst.imms[0])
                } else {
                    None
                },
                last_touch: 0,
            });
            alloc.bound.insert(d, p);
            alloc.touch(p);
            pinned.push(p);
            dst_of.insert(i, p);
        }
        for &i in &unit.members {
            let inst = &mid.insts[i];
            let mut new = inst.clone();
            new.srcs = inst
                .srcs
                .iter()
                .map(|&s| {
                    if mid.pages[s as usize].rf_only {
                        rf_map[&s]
                    } else {
                        let p = alloc.bound[&s];
                        alloc.touch(p);
                        p
                    }
                })
                .collect();
            if let Some(&d) = dst_of.get(&i) {
                new.dst = d;
            } else if inst.opcode == MidOpcode::Store {
                new.dst = new.srcs[0];
            }
            let elide = inst.opcode == MidOpcode::Load && alloc.resident_kept(inst.imms[0]);
            if !elide {
                alloc.out.push(new);
            }
            for &s in &inst.srcs {
                alloc.uses_left[s as usize] -= 1;
            }
            for &s in &inst.srcs {
                if !mid.pages[s as usize].rf_only {
                    alloc.release_dead(s);
                }
            }
        }
    }

    let mut pages: Vec<PageInfo> = (0..config.ctb_pages)
        .map(|_| PageInfo {
            prime: crate::tables::PrimeSel::Q(0),
            domain: rns_ring::Domain::Evaluation,
            rf_only: false,
        })
        .collect();
    pages.extend(rf_pages.iter().copied());
    let out = MidProgram {
        params: mid.params.clone(),
        insts: alloc.out,
        pages,
        distant: alloc.distant,
        n_macro: mid.n_macro,
    };
    Ok((out, alloc.stats))
}

/// Schedule then allocate; the shape every backend consumer expects.
pub fn schedule_and_allocate(
    mid: &MidProgram,
    config: &CompilerConfig,
) -> Result<(MidProgram, AllocStats)> {
    let ordered = schedule(mid, config);
    allocate(&ordered, config)
}
