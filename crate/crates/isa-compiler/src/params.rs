//! Compilation profiles: ring parameters plus the machine-facing knobs the
//! scheduler and allocator need (on-chip capacity, lookahead window, recryption
//! policy).

use bgv_core::BgvParams;

/// Everything the compiler needs to know about the target besides the program.
#[derive(Debug, Clone)]
pub struct CompilerConfig {
    pub bgv: BgvParams,
    /// On-chip pages available to the allocator.  One page holds one residue
    /// polynomial.  The last physical page is reserved as transform scratch,
    /// so `ctb_pages - 1` are allocatable.
    pub ctb_pages: usize,
    /// Off-chip capacity in pages; exceeding it is a compile error.
    pub distant_pages: usize,
    /// In-order lookahead window of the list scheduler, in instructions.
    pub window: usize,
    /// Remaining-budget threshold (bits) at or below which a multiply operand
    /// is recrypted instead of switched further down.
    pub bootstrap_threshold: f64,
    /// Whether recryption keys exist in this profile.
    pub bootstrap_available: bool,
    /// Level a recrypted ciphertext comes back at.
    pub bootstrap_exit_level: usize,
    /// Treat program inputs, constants and switching keys as already staged
    /// on chip: no initial loads are emitted and first touches are free.
    /// Used for steady-state kernel measurements.
    pub inputs_resident: bool,
    /// Model evaluation-key `a` columns as seed-expanded on the fly: only the
    /// `b` columns occupy distant pages and cross the memory interface.
    /// Functional runs need the real columns, so co-simulation profiles keep
    /// this off.
    pub seed_keys: bool,
}

impl CompilerConfig {
    /// Small ring, strict 256-page capacity, everything functional.
    pub fn desk() -> Self {
        CompilerConfig {
            bgv: BgvParams::desk_cosim(),
            ctb_pages: 256,
            distant_pages: 1 << 16,
            window: 128,
            bootstrap_threshold: 0.0,
            bootstrap_available: false,
            bootstrap_exit_level: 0,
            inputs_resident: false,
            seed_keys: false,
        }
    }

    /// Full-scale ring for performance runs.
    pub fn paper_full() -> Self {
        CompilerConfig {
            bgv: BgvParams::full_scale(),
            ctb_pages: 256,
            distant_pages: 1 << 20,
            window: 128,
            bootstrap_threshold: 0.0,
            bootstrap_available: true,
            bootstrap_exit_level: 25,
            inputs_resident: false,
            seed_keys: true,
        }
    }

    /// Full-scale kernel profile: operands and keys pre-staged, capacity
    /// relaxed so the measurement sees the kernel and not the staging.
    pub fn kernel_bench() -> Self {
        CompilerConfig {
            ctb_pages: 1024,
            inputs_resident: true,
            ..Self::paper_full()
        }
    }

    /// Ring sized for the encrypted-lookup workload: shallow 20-bit primes
    /// over a toy degree so the whole thing co-simulates.
    pub fn db_lookup() -> Self {
        CompilerConfig {
            bgv: BgvParams {
                n_log: 4,
                plain_modulus: 241,
                count_q: 26,
                count_p: 2,
                prime_bits: 20,
                sigma: 3.2,
                secret_weight: None,
                digit_width: 4,
            },
            ctb_pages: 256,
            distant_pages: 1 << 16,
            window: 128,
            bootstrap_threshold: 0.0,
            bootstrap_available: false,
            bootstrap_exit_level: 0,
            inputs_resident: false,
            seed_keys: false,
        }
    }

    pub fn n(&self) -> usize {
        1 << self.bgv.n_log
    }

    /// Level micro-benchmarks run at: deep enough that a switch uses the full
    /// digit table, shallow enough that one operand chain fits on chip.
    pub fn benchmark_level(&self) -> usize {
        self.bgv.count_q.min(38)
    }
}
