use accel_model::{
    derive_automorphism_perm, load_eval_page, page_automorphism, read_eval_page, BankedMemory,
    Geometry,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rns_ring::{generate_prime_chain, ntt_direct, Domain, NttPrime, NttTable, ResiduePoly};

fn random_residue(prime: NttPrime, rng: &mut ChaCha8Rng) -> ResiduePoly {
    let half = (prime.q / 2) as i64;
    let coeffs = (0..prime.n()).map(|_| rng.gen_range(-half..=half)).collect();
    ResiduePoly::from_coeffs(prime, Domain::Coefficient, coeffs)
}

/// Coefficient-domain oracle: apply X -> X^k before the transform.
fn oracle(x: &ResiduePoly, k: usize, table: &NttTable) -> ResiduePoly {
    ntt_direct(&x.automorphism_coeff(k).unwrap(), table)
}

fn run_through_banks(eval: &ResiduePoly, k: usize) -> ResiduePoly {
    let g = Geometry::for_degree(eval.prime.n_log);
    let mut mem = BankedMemory::new(g, 2 * g.rows);
    mem.map_page(0, 0).unwrap();
    mem.map_page(1, g.rows).unwrap();
    load_eval_page(&mut mem, 0, eval).unwrap();
    let plan = derive_automorphism_perm(k, g).unwrap();
    assert!(!plan.via_search);
    page_automorphism(&mut mem, 0, 1, &plan).unwrap();
    read_eval_page(&mem, 1, eval.prime).unwrap()
}

#[test]
fn exponent_three_matches_the_coefficient_oracle() {
    let prime = generate_prime_chain(4, 13, 1).unwrap()[0];
    let table = NttTable::new(prime);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let x = random_residue(prime, &mut rng);
    let got = run_through_banks(&ntt_direct(&x, &table), 3);
    assert_eq!(got, oracle(&x, 3, &table));
}

#[test]
fn every_odd_exponent_at_degree_sixteen() {
    let prime = generate_prime_chain(4, 13, 1).unwrap()[0];
    let table = NttTable::new(prime);
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let x = random_residue(prime, &mut rng);
    let eval = ntt_direct(&x, &table);
    for k in (1..32).step_by(2) {
        let got = run_through_banks(&eval, k);
        assert_eq!(got, oracle(&x, k, &table), "mismatch at k = {k}");
    }
}

#[test]
fn identity_exponent_returns_the_page_unchanged() {
    let prime = generate_prime_chain(4, 13, 1).unwrap()[0];
    let table = NttTable::new(prime);
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let eval = ntt_direct(&random_residue(prime, &mut rng), &table);
    assert_eq!(run_through_banks(&eval, 1), eval);
}

#[test]
fn randomized_exponents_at_degree_4096() {
    let prime = generate_prime_chain(12, 27, 1).unwrap()[0];
    let table = NttTable::new(prime);
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let x = random_residue(prime, &mut rng);
    let eval = ntt_direct(&x, &table);
    for _ in 0..12 {
        let k = rng.gen_range(0..prime.n()) * 2 + 1;
        let got = run_through_banks(&eval, k);
        assert_eq!(got, oracle(&x, k, &table), "mismatch at k = {k}");
    }
}
