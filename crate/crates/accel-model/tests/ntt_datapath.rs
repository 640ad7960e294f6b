use accel_model::{
    load_coeff_page, load_eval_page, ntt_pe_execute, page_intt, page_ntt, read_coeff_page,
    read_eval_page, BankedMemory, Geometry,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rns_ring::mont::mont_mul_u32;
use rns_ring::poly::bitrev;
use rns_ring::twiddle::power_generator_mont;
use rns_ring::{
    generate_prime_chain, intt_direct, ntt_direct, Domain, NttPrime, NttTable, ResiduePoly,
    TwoPassTwiddles,
};

fn random_residue(prime: NttPrime, seed: u64) -> ResiduePoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = (prime.q / 2) as i64;
    let coeffs = (0..prime.n()).map(|_| rng.gen_range(-half..=half)).collect();
    ResiduePoly::from_coeffs(prime, Domain::Coefficient, coeffs)
}

fn three_pages(g: Geometry) -> BankedMemory {
    let mut mem = BankedMemory::new(g, 3 * g.rows);
    mem.map_page(0, 0).unwrap();
    mem.map_page(1, g.rows).unwrap();
    mem.map_page(2, 2 * g.rows).unwrap();
    mem
}

fn transform_through_banks(x: &ResiduePoly) -> ResiduePoly {
    let g = Geometry::for_degree(x.prime.n_log);
    let tw = TwoPassTwiddles::new(x.prime, g.rows).unwrap();
    let mut mem = three_pages(g);
    load_coeff_page(&mut mem, 0, x).unwrap();
    page_ntt(&mut mem, 0, 1, 2, &tw).unwrap();
    read_eval_page(&mem, 2, x.prime).unwrap()
}

#[test]
fn delta_transforms_to_all_ones() {
    let prime = generate_prime_chain(4, 13, 1).unwrap()[0];
    let mut coeffs = vec![0i64; 16];
    coeffs[0] = 1;
    let delta = ResiduePoly::from_coeffs(prime, Domain::Coefficient, coeffs);
    let eval = transform_through_banks(&delta);
    assert!(eval.coeffs.iter().all(|&v| v == 1));
}

#[test]
fn degree_16_page_transform_matches_direct() {
    let prime = generate_prime_chain(4, 13, 1).unwrap()[0];
    let table = NttTable::new(prime);
    for seed in [1u64, 2, 3] {
        let x = random_residue(prime, seed);
        assert_eq!(transform_through_banks(&x), ntt_direct(&x, &table));
    }
}

#[test]
fn degree_256_page_transform_matches_direct() {
    let prime = generate_prime_chain(8, 17, 1).unwrap()[0];
    let table = NttTable::new(prime);
    let x = random_residue(prime, 4);
    assert_eq!(transform_through_banks(&x), ntt_direct(&x, &table));
}

#[test]
fn degree_65536_page_transform_matches_direct() {
    let prime = generate_prime_chain(16, 32, 1).unwrap()[0];
    let table = NttTable::new(prime);
    let x = random_residue(prime, 5);
    assert_eq!(transform_through_banks(&x), ntt_direct(&x, &table));
}

#[test]
fn inverse_pages_recover_the_coefficients() {
    let prime = generate_prime_chain(8, 17, 1).unwrap()[0];
    let table = NttTable::new(prime);
    let g = Geometry::for_degree(8);
    let tw = TwoPassTwiddles::new(prime, g.rows).unwrap();
    let x = random_residue(prime, 6);
    let eval = ntt_direct(&x, &table);

    let mut mem = three_pages(g);
    load_eval_page(&mut mem, 0, &eval).unwrap();
    page_intt(&mut mem, 0, 1, 2, &tw).unwrap();
    let back = read_coeff_page(&mem, 2, prime).unwrap();
    assert_eq!(back, x);
    assert_eq!(back, intt_direct(&eval, &table));
}

#[test]
fn pass1_chunk_matches_a_straight_line_recomputation() {
    let prime = generate_prime_chain(8, 17, 1).unwrap()[0];
    let g = Geometry::for_degree(8);
    let tw = TwoPassTwiddles::new(prime, g.rows).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let col = 5usize;
    let lanes: Vec<u32> = (0..g.rows).map(|_| rng.gen_range(0..prime.q)).collect();

    let out = &ntt_pe_execute(&[(col, lanes.clone())], &tw, 1)[0];

    // Straight-line column transform: twist, textbook radix-2 passes on an
    // index-reversal schedule, cross factors.
    let q = prime.q;
    let lf = prime.low_fixed;
    let n1 = g.rows;
    let m1 = n1.trailing_zeros();
    let mut x: Vec<u32> = (0..n1)
        .map(|r| mont_mul_u32(lanes[r], tw.pre_pass1[r], q, lf))
        .collect();
    let mut half = n1 / 2;
    while half >= 1 {
        let stride = n1 / (2 * half);
        for block in 0..stride {
            for j in 0..half {
                let lo = block * 2 * half + j;
                let hi = lo + half;
                let a = x[lo];
                let b = x[hi];
                let sum = (a as u64 + b as u64) % q as u64;
                let diff = (a as u64 + q as u64 - b as u64) % q as u64;
                x[lo] = sum as u32;
                x[hi] = mont_mul_u32(diff as u32, tw.butterfly_pass1[j * stride], q, lf);
            }
        }
        half /= 2;
    }
    let factors = power_generator_mont(tw.post_seeds[col], n1 - 1, &prime);
    for (b1, v) in x.iter_mut().enumerate() {
        let k1 = bitrev(b1, m1);
        if k1 != 0 {
            *v = mont_mul_u32(*v, factors[k1 - 1], q, lf);
        }
    }
    assert_eq!(out, &x);
}
