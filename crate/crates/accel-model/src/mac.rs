//! Lane-parallel multiply-accumulate unit with a 16-entry register file
//! and a 2048-lane accumulator.
//!
//! Lane words are residues in standard form; multiplier constants arrive
//! in Montgomery form so a single Montgomery multiply yields a standard
//! form product, exactly as the ring kernels compute.  Crossing from one
//! lane modulus to another recodes through the centered representative.
//! Every micro-op records where its operands lived (scratchpad, register
//! file, accumulator, immediate); the counters feed the bandwidth model
//! and back the operand-reuse comparisons.

use crate::error::AccelError;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rns_ring::mont::{inv_mod, mont_mul_u32, to_centered};
use rns_ring::NttPrime;

pub const RF_DEPTH: usize = 16;
pub const MAC_LANES: usize = 2048;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MacCounters {
    /// Chunk operand fetches from the scratchpad.
    pub ctb_reads: u64,
    /// Chunk results written back to the scratchpad.
    pub ctb_writes: u64,
    pub rf_reads: u64,
    pub rf_writes: u64,
    /// Lane-parallel arithmetic operations issued.
    pub alu_ops: u64,
}

#[derive(Debug, Clone)]
pub struct MacState {
    rf: Vec<Vec<u32>>,
    acc: Vec<u32>,
    pub counters: MacCounters,
}

#[derive(Debug, Clone, Copy)]
pub enum MacSource<'a> {
    /// A chunk fetched from the scratchpad (at most 2048 lanes, zero padded).
    Ctb(&'a [u32]),
    Rf(usize),
    Imm(u32),
}

#[derive(Debug, Clone, Copy)]
pub enum MacUop<'a> {
    LoadRf {
        dst: usize,
        src: MacSource<'a>,
    },
    /// Multiply a register entry in place by a Montgomery-form constant.
    ScaleRf {
        entry: usize,
        factor_mont: u32,
        prime: NttPrime,
    },
    AccClear,
    /// acc += source * weight under `prime`, optionally recoding source
    /// lanes from another modulus first.
    AccMac {
        src: MacSource<'a>,
        weight_mont: u32,
        prime: NttPrime,
        recode_from: Option<NttPrime>,
    },
    /// acc += rf[entry] * source, lane-wise.  One operand streams from the
    /// scratchpad at half rate while the other sits in the register file,
    /// so products of two full chunks cost a single fetch.
    MacChunk {
        entry: usize,
        src: MacSource<'a>,
        prime: NttPrime,
    },
    AccAdd {
        src: MacSource<'a>,
        prime: NttPrime,
    },
    /// rf[entry] += source, lane-wise under `prime`.
    AddRf {
        entry: usize,
        src: MacSource<'a>,
        prime: NttPrime,
    },
    /// Drain the first `lanes` accumulator lanes to the scratchpad.
    StoreAcc {
        lanes: usize,
    },
    StoreRf {
        entry: usize,
        lanes: usize,
    },
}

fn check_rf(index: usize) -> Result<(), AccelError> {
    if index >= RF_DEPTH {
        return Err(AccelError::RfIndex { index });
    }
    Ok(())
}

fn recode(v: u32, from: NttPrime, to_q: u32) -> u32 {
    to_centered(v, from.q).rem_euclid(to_q as i64) as u32
}

impl MacState {
    pub fn new() -> Self {
        MacState {
            rf: vec![vec![0u32; MAC_LANES]; RF_DEPTH],
            acc: vec![0u32; MAC_LANES],
            counters: MacCounters::default(),
        }
    }

    fn fetch(&mut self, src: MacSource<'_>) -> Result<Vec<u32>, AccelError> {
        match src {
            MacSource::Ctb(chunk) => {
                assert!(chunk.len() <= MAC_LANES);
                self.counters.ctb_reads += 1;
                let mut lanes = chunk.to_vec();
                lanes.resize(MAC_LANES, 0);
                Ok(lanes)
            }
            MacSource::Rf(i) => {
                check_rf(i)?;
                self.counters.rf_reads += 1;
                Ok(self.rf[i].clone())
            }
            MacSource::Imm(v) => Ok(vec![v; MAC_LANES]),
        }
    }
}

impl Default for MacState {
    fn default() -> Self {
        MacState::new()
    }
}

pub fn mac_execute(state: &mut MacState, uop: MacUop<'_>) -> Result<Option<Vec<u32>>, AccelError> {
    match uop {
        MacUop::LoadRf { dst, src } => {
            check_rf(dst)?;
            let lanes = state.fetch(src)?;
            state.counters.rf_writes += 1;
            state.rf[dst] = lanes;
            Ok(None)
        }
        MacUop::ScaleRf {
            entry,
            factor_mont,
            prime,
        } => {
            check_rf(entry)?;
            state.counters.rf_reads += 1;
            state.counters.rf_writes += 1;
            state.counters.alu_ops += 1;
            for v in state.rf[entry].iter_mut() {
                assert!(*v < prime.q);
                *v = mont_mul_u32(*v, factor_mont, prime.q, prime.low_fixed);
            }
            Ok(None)
        }
        MacUop::AccClear => {
            state.acc.iter_mut().for_each(|v| *v = 0);
            Ok(None)
        }
        MacUop::AccMac {
            src,
            weight_mont,
            prime,
            recode_from,
        } => {
            let lanes = state.fetch(src)?;
            state.counters.alu_ops += 1;
            let q = prime.q;
            for (acc, &v) in state.acc.iter_mut().zip(&lanes) {
                let y = match recode_from {
                    Some(from) => recode(v, from, q),
                    None => v,
                };
                assert!(y < q);
                let prod = mont_mul_u32(y, weight_mont, q, prime.low_fixed);
                let mut sum = *acc as u64 + prod as u64;
                if sum >= q as u64 {
                    sum -= q as u64;
                }
                *acc = sum as u32;
            }
            Ok(None)
        }
        MacUop::MacChunk { entry, src, prime } => {
            check_rf(entry)?;
            let lanes = state.fetch(src)?;
            state.counters.rf_reads += 1;
            state.counters.alu_ops += 1;
            let q = prime.q;
            for ((acc, &v), &r) in state.acc.iter_mut().zip(&lanes).zip(&state.rf[entry]) {
                assert!(v < q && r < q);
                let prod = mont_mul_u32(r, v, q, prime.low_fixed);
                let mut sum = *acc as u64 + prod as u64;
                if sum >= q as u64 {
                    sum -= q as u64;
                }
                *acc = sum as u32;
            }
            Ok(None)
        }
        MacUop::AccAdd { src, prime } => {
            let lanes = state.fetch(src)?;
            state.counters.alu_ops += 1;
            let q = prime.q as u64;
            for (acc, &v) in state.acc.iter_mut().zip(&lanes) {
                assert!((v as u64) < q);
                let mut sum = *acc as u64 + v as u64;
                if sum >= q {
                    sum -= q;
                }
                *acc = sum as u32;
            }
            Ok(None)
        }
        MacUop::AddRf { entry, src, prime } => {
            check_rf(entry)?;
            let lanes = state.fetch(src)?;
            state.counters.rf_reads += 1;
            state.counters.rf_writes += 1;
            state.counters.alu_ops += 1;
            let q = prime.q as u64;
            for (slot, &v) in state.rf[entry].iter_mut().zip(&lanes) {
                assert!((v as u64) < q && (*slot as u64) < q);
                let mut sum = *slot as u64 + v as u64;
                if sum >= q {
                    sum -= q;
                }
                *slot = sum as u32;
            }
            Ok(None)
        }
        MacUop::StoreAcc { lanes } => {
            assert!(lanes <= MAC_LANES);
            state.counters.ctb_writes += 1;
            Ok(Some(state.acc[..lanes].to_vec()))
        }
        MacUop::StoreRf { entry, lanes } => {
            check_rf(entry)?;
            assert!(lanes <= MAC_LANES);
            state.counters.rf_reads += 1;
            state.counters.ctb_writes += 1;
            Ok(Some(state.rf[entry][..lanes].to_vec()))
        }
    }
}

/// Base-extension constants and the two MAC schedules that apply them.
///
/// The register-file schedule loads each source chunk once, scales it to
/// the digit in place, and reuses it across every target; the naive
/// schedule spills the digits and refetches them per target.  Outputs are
/// identical word for word; only the scratchpad traffic differs.
#[derive(Debug, Clone)]
pub struct FbeKernel {
    pub source: Vec<NttPrime>,
    pub target: Vec<NttPrime>,
    pub inv_punctured_mont: Vec<u32>,
    pub weights_mont: Vec<Vec<u32>>,
}

impl FbeKernel {
    pub fn new(source: &[NttPrime], target: &[NttPrime]) -> Self {
        assert!(source.len() <= RF_DEPTH);
        let product: BigInt = source.iter().map(|p| BigInt::from(p.q)).product();
        let inv_punctured_mont = source
            .iter()
            .map(|p| {
                let m_mod = (&product / p.q % p.q).to_u32().unwrap();
                p.to_mont(inv_mod(m_mod, p.q))
            })
            .collect();
        let weights_mont = target
            .iter()
            .map(|tp| {
                source
                    .iter()
                    .map(|sp| {
                        let m: BigInt = &product / sp.q;
                        tp.to_mont((m % tp.q).to_u32().unwrap())
                    })
                    .collect()
            })
            .collect();
        FbeKernel {
            source: source.to_vec(),
            target: target.to_vec(),
            inv_punctured_mont,
            weights_mont,
        }
    }

    /// Register-file schedule: d chunk reads, one output write per target.
    pub fn run_buffered(
        &self,
        state: &mut MacState,
        chunks: &[Vec<u32>],
    ) -> Result<Vec<Vec<u32>>, AccelError> {
        let d = self.source.len();
        assert_eq!(chunks.len(), d);
        let n = chunks[0].len();
        for (i, chunk) in chunks.iter().enumerate() {
            assert_eq!(chunk.len(), n);
            mac_execute(
                state,
                MacUop::LoadRf {
                    dst: i,
                    src: MacSource::Ctb(chunk),
                },
            )?;
            mac_execute(
                state,
                MacUop::ScaleRf {
                    entry: i,
                    factor_mont: self.inv_punctured_mont[i],
                    prime: self.source[i],
                },
            )?;
        }
        let mut outs = Vec::with_capacity(self.target.len());
        for (tj, tp) in self.target.iter().enumerate() {
            mac_execute(state, MacUop::AccClear)?;
            for i in 0..d {
                mac_execute(
                    state,
                    MacUop::AccMac {
                        src: MacSource::Rf(i),
                        weight_mont: self.weights_mont[tj][i],
                        prime: *tp,
                        recode_from: Some(self.source[i]),
                    },
                )?;
            }
            outs.push(mac_execute(state, MacUop::StoreAcc { lanes: n })?.unwrap());
        }
        Ok(outs)
    }

    /// No-reuse schedule: digits are spilled to the scratchpad and read
    /// back for every target.
    pub fn run_naive(
        &self,
        state: &mut MacState,
        chunks: &[Vec<u32>],
    ) -> Result<Vec<Vec<u32>>, AccelError> {
        let d = self.source.len();
        assert_eq!(chunks.len(), d);
        let n = chunks[0].len();
        let mut digits = Vec::with_capacity(d);
        for (i, chunk) in chunks.iter().enumerate() {
            mac_execute(state, MacUop::AccClear)?;
            mac_execute(
                state,
                MacUop::AccMac {
                    src: MacSource::Ctb(chunk),
                    weight_mont: self.inv_punctured_mont[i],
                    prime: self.source[i],
                    recode_from: None,
                },
            )?;
            digits.push(mac_execute(state, MacUop::StoreAcc { lanes: n })?.unwrap());
        }
        let mut outs = Vec::with_capacity(self.target.len());
        for (tj, tp) in self.target.iter().enumerate() {
            mac_execute(state, MacUop::AccClear)?;
            for i in 0..d {
                mac_execute(
                    state,
                    MacUop::AccMac {
                        src: MacSource::Ctb(&digits[i]),
                        weight_mont: self.weights_mont[tj][i],
                        prime: *tp,
                        recode_from: Some(self.source[i]),
                    },
                )?;
            }
            outs.push(mac_execute(state, MacUop::StoreAcc { lanes: n })?.unwrap());
        }
        Ok(outs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rns_ring::generate_prime_chain;

    #[test]
    fn rf_index_out_of_range() {
        let mut state = MacState::new();
        let err = mac_execute(
            &mut state,
            MacUop::LoadRf {
                dst: 16,
                src: MacSource::Imm(0),
            },
        );
        assert_eq!(err, Err(AccelError::RfIndex { index: 16 }));
        let err = mac_execute(
            &mut state,
            MacUop::AccMac {
                src: MacSource::Rf(31),
                weight_mont: 0,
                prime: generate_prime_chain(2, 13, 1).unwrap()[0],
                recode_from: None,
            },
        );
        assert_eq!(err, Err(AccelError::RfIndex { index: 31 }));
    }

    #[test]
    fn multiply_by_immediate_one_is_identity() {
        let p = generate_prime_chain(2, 13, 1).unwrap()[0];
        let mut state = MacState::new();
        let chunk = vec![0u32, 1, p.q - 1, 1234 % p.q];
        mac_execute(&mut state, MacUop::AccClear).unwrap();
        mac_execute(
            &mut state,
            MacUop::AccMac {
                src: MacSource::Ctb(&chunk),
                weight_mont: p.to_mont(1),
                prime: p,
                recode_from: None,
            },
        )
        .unwrap();
        let out = mac_execute(&mut state, MacUop::StoreAcc { lanes: chunk.len() })
            .unwrap()
            .unwrap();
        assert_eq!(out, chunk);
    }

    #[test]
    fn chunk_times_chunk_matches_modular_product() {
        use rns_ring::mont::mul_mod_u32;
        let p = generate_prime_chain(2, 13, 1).unwrap()[0];
        let a = vec![5u32, 0, p.q - 1, 7731 % p.q];
        let b = vec![3u32, 9, p.q - 1, 4099 % p.q];
        let mut state = MacState::new();
        mac_execute(
            &mut state,
            MacUop::LoadRf {
                dst: 2,
                src: MacSource::Ctb(&a),
            },
        )
        .unwrap();
        let r2 = p.to_mont(p.to_mont(1));
        mac_execute(
            &mut state,
            MacUop::ScaleRf {
                entry: 2,
                factor_mont: r2,
                prime: p,
            },
        )
        .unwrap();
        mac_execute(&mut state, MacUop::AccClear).unwrap();
        mac_execute(
            &mut state,
            MacUop::MacChunk {
                entry: 2,
                src: MacSource::Ctb(&b),
                prime: p,
            },
        )
        .unwrap();
        let out = mac_execute(&mut state, MacUop::StoreAcc { lanes: 4 })
            .unwrap()
            .unwrap();
        for i in 0..4 {
            assert_eq!(out[i], mul_mod_u32(a[i], b[i], p.q));
        }
        assert_eq!(state.counters.ctb_reads, 2);
    }

    #[test]
    fn chunk_plus_chunk_through_the_register_file() {
        let p = generate_prime_chain(2, 13, 1).unwrap()[0];
        let a = vec![5u32, 0, p.q - 1, 7];
        let b = vec![3u32, 9, 1, p.q - 2];
        let mut state = MacState::new();
        mac_execute(
            &mut state,
            MacUop::LoadRf {
                dst: 0,
                src: MacSource::Ctb(&a),
            },
        )
        .unwrap();
        mac_execute(
            &mut state,
            MacUop::AddRf {
                entry: 0,
                src: MacSource::Ctb(&b),
                prime: p,
            },
        )
        .unwrap();
        let out = mac_execute(&mut state, MacUop::StoreRf { entry: 0, lanes: 4 })
            .unwrap()
            .unwrap();
        for i in 0..4 {
            assert_eq!(out[i], (a[i] + b[i]) % p.q);
        }
        assert_eq!(state.counters.ctb_reads, 2);
        assert_eq!(state.counters.alu_ops, 1);
        assert_eq!(state.counters.ctb_writes, 1);
    }
}
