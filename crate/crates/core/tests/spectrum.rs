use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use solfree_core::cayley::{alpha_upper_ratio, build_cayley};
use solfree_core::field::PrimeField;

#[test]
fn least_eigenvalue_matches_dense_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [7u64, 11, 13, 29, 31, 53] {
        let f = PrimeField::new(p).unwrap();
        for _ in 0..5 {
            let mut pool: Vec<u64> = (1..p).collect();
            pool.shuffle(&mut rng);
            let gens = &pool[..rng.gen_range(1..p as usize)];
            let g = build_cayley(f, gens).unwrap();
            let n = p as usize;
            let m = DMatrix::<f64>::from_fn(n, n, |i, j| {
                if g.adjacent(i as u64, j as u64) {
                    1.0
                } else {
                    0.0
                }
            });
            let dense_min: f64 = m.symmetric_eigen().eigenvalues.min();
            let r = alpha_upper_ratio(&g);
            assert!(
                (r.lambda_min - dense_min).abs() < 1e-8,
                "p={p}: {} vs {dense_min}",
                r.lambda_min
            );
            assert!(r.padded >= r.raw);
        }
    }
}

#[test]
fn ratio_bound_is_tight_on_paley() {
    // Quadratic residues mod 13: α = √13 rounded down is 3.
    let f = PrimeField::new(13).unwrap();
    let qr: Vec<u64> = (1..13).map(|x| x * x % 13).collect();
    let g = build_cayley(f, &qr).unwrap();
    let r = alpha_upper_ratio(&g);
    assert!((r.raw - 13f64.sqrt()).abs() < 1e-9);
    assert_eq!(r.certified, 3);
}
