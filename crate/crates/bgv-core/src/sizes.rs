//! Closed-form object sizes for a parameter set, in bytes.  One
//! coefficient residue occupies one 32-bit word.

use crate::params::BgvParams;

/// Two-part ciphertext at a given level.
pub fn ciphertext_bytes(params: &BgvParams, level: usize) -> usize {
    2 * level * params.n() * 4
}

/// Key-switching key over the full chain plus extension, counting rows'
/// b parts only when the a parts are regenerated from a seed.
pub fn ksw_key_bytes(params: &BgvParams, seed_compressed: bool) -> usize {
    let rows = params.count_q.div_ceil(params.digit_width);
    let polys_per_row = if seed_compressed { 1 } else { 2 };
    rows * polys_per_row * (params.count_q + params.count_p) * params.n() * 4
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::BgvParams;

    #[test]
    fn full_scale_sizes() {
        let p = BgvParams::full_scale();
        assert_eq!(ciphertext_bytes(&p, 42), 22_020_096); // 21 MiB
        assert_eq!(ksw_key_bytes(&p, true), 58_720_256); // 56 MiB
        assert_eq!(ksw_key_bytes(&p, false), 2 * 58_720_256);
    }
}
