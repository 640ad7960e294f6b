use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AccelError {
    #[error("page {page} is not mapped")]
    UnmappedPage { page: u32 },
    #[error("page {page} would overlap an existing mapping")]
    PageOverlap { page: u32 },
    #[error("page {page} does not fit below the bank capacity")]
    PageRange { page: u32 },
    #[error("permutation multiplier {a} is even")]
    EvenMultiplier { a: usize },
    #[error("automorphism exponent {k} is even")]
    EvenAutomorphism { k: usize },
    #[error("no routing plan for automorphism exponent {k} on this layout")]
    UnsupportedAutomorphism { k: usize },
    #[error("register file index {index} out of range (depth 16)")]
    RfIndex { index: usize },
}
