use thiserror::Error;

#[derive(Debug, Error)]
pub enum BootstrapError {
    #[error(transparent)]
    Bgv(#[from] bgv_core::BgvError),
    #[error(transparent)]
    Ring(#[from] rns_ring::RingError),
    #[error("chain too short: recryption needs {needed} primes, chain has {have}")]
    ChainTooShort { needed: usize, have: usize },
    #[error("plaintext modulus {t} is not {p}^{r}")]
    PlainModulusShape { t: u64, p: u64, r: u32 },
    #[error("digit junk bound {junk:.1} does not fit under p^(e-r)/2 = {half:.1}")]
    JunkOverflow { junk: f64, half: f64 },
    #[error("raised precision must exceed plaintext precision: e = {e}, r = {r}")]
    PrecisionOrder { e: u32, r: u32 },
    #[error("table build cancelled")]
    Cancelled,
    #[error("table cache has an incompatible header")]
    CacheFormat,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
