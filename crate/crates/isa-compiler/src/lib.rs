//! Three-level compiler for the accelerator: a small arithmetic-circuit
//! language is lowered to macro instructions over whole ciphertexts, then to
//! mid-level instructions over residue polynomials, then to the micro
//! operations the functional model executes.  Each level has a matching
//! reference executor so lowerings can be checked end to end.

pub mod circuit;
pub mod error;
pub mod estimator;
pub mod interp;
pub mod macro_ir;
pub mod mid_ir;
pub mod params;
pub mod tables;

pub use circuit::{parse_circuit, Circuit, CircuitNode, CircuitOp};
pub use error::{CompileError, Result};
pub use macro_ir::{lower_macro, MacroInst, MacroOpcode, MacroProgram};
pub use mid_ir::{lower_mid, MidInst, MidOpcode, MidProgram};
pub use params::CompilerConfig;
pub use tables::{ChainTables, PrimeSel};
