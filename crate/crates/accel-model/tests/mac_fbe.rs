use accel_model::{FbeKernel, MacState};
use bgv_core::FbeTable;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rns_ring::mont::{to_centered, to_unsigned};
use rns_ring::{generate_prime_chain, Domain, NttPrime, ResiduePoly};

fn random_residue(prime: NttPrime, rng: &mut ChaCha8Rng) -> ResiduePoly {
    let half = (prime.q / 2) as i64;
    let coeffs = (0..prime.n()).map(|_| rng.gen_range(-half..=half)).collect();
    ResiduePoly::from_coeffs(prime, Domain::Coefficient, coeffs)
}

fn as_chunk(poly: &ResiduePoly) -> Vec<u32> {
    poly.coeffs
        .iter()
        .map(|&v| to_unsigned(v, poly.prime.q))
        .collect()
}

#[test]
fn weighted_sum_loop_reproduces_the_base_extension() {
    let chain = generate_prime_chain(4, 17, 48).unwrap();
    let source = &chain[..4];
    let target = &chain[4..];
    assert_eq!(target.len(), 44);

    let mut rng = ChaCha8Rng::seed_from_u64(4401);
    let inputs: Vec<ResiduePoly> = source.iter().map(|&p| random_residue(p, &mut rng)).collect();
    let refs: Vec<&ResiduePoly> = inputs.iter().collect();
    let reference = FbeTable::new(source, target).extend(&refs);

    let kernel = FbeKernel::new(source, target);
    let chunks: Vec<Vec<u32>> = inputs.iter().map(as_chunk).collect();

    let mut buffered_state = MacState::new();
    let buffered = kernel.run_buffered(&mut buffered_state, &chunks).unwrap();
    let mut naive_state = MacState::new();
    let naive = kernel.run_naive(&mut naive_state, &chunks).unwrap();

    for (j, tp) in target.iter().enumerate() {
        for i in 0..tp.n() {
            assert_eq!(to_centered(buffered[j][i], tp.q), reference[j].coeffs[i]);
        }
    }
    assert_eq!(buffered, naive);

    let b = buffered_state.counters;
    let n = naive_state.counters;
    assert_eq!(b.ctb_reads, 4);
    assert_eq!(b.ctb_writes, 44);
    assert_eq!(n.ctb_reads, 4 + 4 * 44);
    assert_eq!(n.ctb_writes, 4 + 44);
    assert!(n.ctb_reads >= 40 * b.ctb_reads);
}

#[test]
fn register_file_rejects_more_than_sixteen_sources() {
    let chain = generate_prime_chain(4, 17, 17).unwrap();
    let result = std::panic::catch_unwind(|| FbeKernel::new(&chain, &chain[..1]));
    assert!(result.is_err());
}
