use accel_model::{permute, PermutationSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn xor_mask_restores_column_read_order() {
    // Bank-order column read of the 4x4 layout back to index order.
    let spec = PermutationSpec::new(1, 0, 1, 4).unwrap();
    let out = permute(&[5, 1, 13, 9], &spec).unwrap();
    assert_eq!(out, vec![1, 5, 9, 13]);
}

#[test]
fn network_matches_the_affine_xor_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x07e6a);
    for w in 1..=10u32 {
        let width = 1usize << w;
        let values: Vec<u32> = (0..width as u32).map(|v| v.wrapping_mul(2654435761)).collect();
        for c in 0..width {
            for _ in 0..4 {
                let a = rng.gen_range(0..width / 2) * 2 + 1;
                let b = rng.gen_range(0..width);
                let spec = PermutationSpec::new(a, b, c, width).unwrap();
                let out = permute(&values, &spec).unwrap();
                for i in 0..width {
                    assert_eq!(out[spec.dest(i)], values[i]);
                }
            }
        }
    }
}

#[test]
fn lane_map_is_a_bijection_for_every_odd_multiplier() {
    for w in 1..=10u32 {
        let width = 1usize << w;
        for a in (1..width).step_by(2) {
            let spec = PermutationSpec::new(a, 0, 0, width).unwrap();
            let mut seen = vec![false; width];
            for i in 0..width {
                let d = spec.dest(i);
                assert!(!seen[d], "collision at w={w}, a={a}");
                seen[d] = true;
            }
        }
    }
}

#[test]
fn routing_handles_all_offsets_and_masks_at_desk_width() {
    let width = 16;
    let values: Vec<u32> = (100..116).collect();
    for a in (1..width).step_by(2) {
        for b in 0..width {
            for c in 0..width {
                let spec = PermutationSpec::new(a, b, c, width).unwrap();
                let out = permute(&values, &spec).unwrap();
                for i in 0..width {
                    assert_eq!(out[spec.dest(i)], values[i]);
                }
            }
        }
    }
}
