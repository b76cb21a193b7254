//! Counting arguments of the appendix.

use colmix::verify::random_distribution;
use colmix::{insertion_factor, typicality_entropy_check, Error};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn typicality_deficit_shrinks(seed in any::<u64>(), d in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Smallest entry is at least floor / (d (floor + 1)) >= 0.05.
        let floor = 0.05 * d as f64 / (1.0 - 0.05 * d as f64) + 0.01;
        let rho = random_distribution(&mut rng, d, floor);
        prop_assume!(rho.probabilities().iter().all(|&p| p >= 0.05));
        let deficits: Vec<f64> =
            [100, 1000, 10_000].iter().map(|&n| typicality_entropy_check(&rho, n).unwrap().deficit).collect();
        prop_assert!(deficits[0] > deficits[1] && deficits[1] > deficits[2], "{deficits:?}");
        prop_assert!(deficits[2] > 0.0);
    }

    #[test]
    fn insertion_factor_approaches_inverse_probability(n in 1usize..200_000, rho_a in 1e-3f64..=1.0) {
        let f = insertion_factor(n, rho_a).unwrap();
        prop_assert!(f.rel_err < 2.0 / (n as f64 * rho_a), "{f:?}");
    }
}

#[test]
fn zero_probability_diverges() {
    assert_eq!(insertion_factor(10, 0.0), Err(Error::DivergentInsertionFactor));
}
