//! Recryption for the leveled BGV core: raise a nearly exhausted
//! ciphertext onto a fresh modulus chain and homomorphically round away
//! the noise digits, restoring budget without touching the secret key.
//!
//! The scheme follows the thin-ciphertext route: slot constants are moved
//! into polynomial coefficients while decryption is still cheap, the
//! coefficients ride through the raise, and a trace plus inverse
//! Vandermonde map puts them back into slots before digit extraction.

pub mod bootstrap;
pub mod circuit;
pub mod digits;
pub mod error;
pub mod params;
pub mod raise;
pub mod reference;
pub mod transforms;

pub use bootstrap::{bootstrap, gen_bootstrap_keys, BootstrapKeys};
pub use circuit::RoundingCircuit;
pub use error::BootstrapError;
pub use params::{BootstrapContext, BootstrapParams};
pub use raise::{modulus_raise, RaiseTables};
