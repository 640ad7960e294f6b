//! Lane permutation unit: the affine-XOR family i -> ((i*a + b) mod 2^w) ^ c,
//! realized on a multistage shuffle-exchange network with destination-tag
//! routing.  The switch fabric has w stages of 2x2 nodes; each message
//! consumes one destination bit per stage, most significant first.  Routing
//! is asserted conflict-free for every spec of the family.

use crate::error::AccelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermutationSpec {
    /// Odd multiplier.
    pub a: usize,
    /// Additive offset, applied modulo the width.
    pub b: usize,
    /// XOR mask, applied after the affine part.
    pub c: usize,
    /// Lane count, a power of two.
    pub width: usize,
}

impl PermutationSpec {
    pub fn new(a: usize, b: usize, c: usize, width: usize) -> Result<Self, AccelError> {
        assert!(width.is_power_of_two());
        assert!(b < width && c < width);
        if a % 2 == 0 {
            return Err(AccelError::EvenMultiplier { a });
        }
        Ok(PermutationSpec { a, b, c, width })
    }

    pub fn identity(width: usize) -> Self {
        PermutationSpec::new(1, 0, 0, width).unwrap()
    }

    /// Destination lane of input lane i.
    pub fn dest(&self, i: usize) -> usize {
        assert!(i < self.width);
        (i.wrapping_mul(self.a).wrapping_add(self.b) & (self.width - 1)) ^ self.c
    }
}

/// Route one chunk through the switch network: output[spec.dest(i)] = input[i].
pub fn permute(values: &[u32], spec: &PermutationSpec) -> Result<Vec<u32>, AccelError> {
    assert_eq!(values.len(), spec.width);
    if spec.a % 2 == 0 {
        return Err(AccelError::EvenMultiplier { a: spec.a });
    }
    let w = spec.width.trailing_zeros();
    if w == 0 {
        return Ok(values.to_vec());
    }
    let size = spec.width;
    let mask = size - 1;

    let mut cur: Vec<(u32, usize)> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, spec.dest(i)))
        .collect();
    let mut next = vec![(0u32, 0usize); size];
    for stage in 0..w {
        // Perfect shuffle: position bits rotate left by one.
        for (p, &m) in cur.iter().enumerate() {
            let shuffled = ((p << 1) | (p >> (w - 1))) & mask;
            next[shuffled] = m;
        }
        // Each 2x2 node picks its output port from the current tag bit.
        let bit = w - 1 - stage;
        for node in 0..size / 2 {
            let up = next[2 * node];
            let down = next[2 * node + 1];
            let up_bit = (up.1 >> bit) & 1;
            let down_bit = (down.1 >> bit) & 1;
            assert!(
                up_bit != down_bit,
                "switch conflict at stage {stage}, node {node}"
            );
            if up_bit == 1 {
                next.swap(2 * node, 2 * node + 1);
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }

    let mut out = vec![0u32; size];
    for (p, &(v, dest)) in cur.iter().enumerate() {
        assert_eq!(p, dest);
        out[p] = v;
    }
    Ok(out)
}
