//! Functional models of the accelerator datapath: the XOR-striped banked
//! scratchpad, the affine-XOR lane permutation unit, automorphism routing
//! over the banked layout, the four-pipeline transform unit, and the
//! 2048-lane multiply-accumulate unit with its register file.  Every model
//! is a deterministic sequential state machine whose arithmetic is
//! bit-identical to the ring kernels it mirrors.

pub mod autoperm;
pub mod banked;
pub mod error;
pub mod mac;
pub mod ntt_pe;
pub mod omega;
pub mod pages;

pub use autoperm::{derive_automorphism_perm, page_automorphism, AutomorphismPlan, ColumnRoute};
pub use banked::{BankedMemory, Geometry};
pub use error::AccelError;
pub use mac::{mac_execute, FbeKernel, MacCounters, MacSource, MacState, MacUop, MAC_LANES, RF_DEPTH};
pub use ntt_pe::{
    intt_pe_execute, multiplier_count, ntt_pe_execute, page_intt, page_ntt, NTT_UNITS,
};
pub use omega::{permute, PermutationSpec};
pub use pages::{load_coeff_page, load_eval_page, read_coeff_page, read_eval_page};
