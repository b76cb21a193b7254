//! Invariants of states, entropies and Gibbs states over seeded random instances.

use colmix::entropy::{shannon_entropy, von_neumann_entropy};
use colmix::{
    apply_unitary, gibbs_state, random_haar_unitary, random_hermitian, relative_entropy, ClassicalDistribution,
    DensityF32, DensityOperator, HermitianF32, HermitianOperator, InverseTemperature,
};
use proptest::prelude::*;

fn random_state(seed: u64, d: usize, beta: f64) -> DensityOperator<f64> {
    let h = random_hermitian::<f64>(seed, d).unwrap();
    let rho = gibbs_state(&h, InverseTemperature::new(beta).unwrap()).unwrap();
    apply_unitary(&rho, &random_haar_unitary(seed ^ 0xabcd, d).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// The rotated state is rebuilt from its raw matrix, so its spectrum is recomputed from scratch.
    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>(), d in 2usize..=8, beta in 0.05f64..4.0) {
        let rho = random_state(seed, d, beta);
        let u = random_haar_unitary::<f64>(seed.wrapping_add(1), d).unwrap();
        let raw = u.matrix() * rho.matrix() * u.matrix().adjoint();
        let sigma = DensityOperator::new(raw).unwrap();
        let diff = (von_neumann_entropy(&sigma).unwrap() - von_neumann_entropy(&rho).unwrap()).abs();
        prop_assert!(diff < 1e-10, "diff {diff}");
    }

    #[test]
    fn klein_inequality(seed in any::<u64>(), d in 2usize..=6, b1 in 0.1f64..3.0, b2 in 0.1f64..3.0) {
        let sigma = random_state(seed, d, b1);
        let rho = random_state(seed.wrapping_mul(31).wrapping_add(7), d, b2);
        let s = relative_entropy(&sigma, &rho).unwrap();
        prop_assert!(s >= 0.0);
        if sigma.max_distance(&rho) > 1e-3 {
            prop_assert!(s > 1e-10);
        }
        prop_assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-10);
    }

    #[test]
    fn nearby_states_have_vanishing_relative_entropy(seed in any::<u64>(), d in 2usize..=5, eps in 1e-12f64..1e-9) {
        let rho = random_state(seed, d, 1.0);
        let mix = DensityOperator::maximally_mixed(d).unwrap();
        let near = DensityOperator::new(rho.matrix() * nalgebra::Complex::new(1.0 - eps, 0.0)
            + mix.matrix() * nalgebra::Complex::new(eps, 0.0)).unwrap();
        prop_assert!(near.max_distance(&rho) < 1e-8);
        prop_assert!(relative_entropy(&near, &rho).unwrap() < 1e-10);
    }

    #[test]
    fn gibbs_states_are_strictly_positive(seed in any::<u64>(), d in 2usize..=8, x in -500.0f64..=500.0) {
        let h = random_hermitian::<f64>(seed, d).unwrap();
        let spec = h.eigenvalues();
        let range = spec[d - 1] - spec[0];
        let beta = x / range;
        let rho = gibbs_state(&h, InverseTemperature::new(beta).unwrap()).unwrap();
        prop_assert!(rho.eigenvalues().iter().all(|&p| p > 0.0), "beta {beta}: {:?}", rho.eigenvalues());
    }

    #[test]
    fn shannon_of_spectrum_is_von_neumann(seed in any::<u64>(), d in 2usize..=8, beta in 0.05f64..4.0) {
        let rho = random_state(seed, d, beta);
        let raw = DensityOperator::new(rho.matrix().clone()).unwrap();
        let spectrum = ClassicalDistribution::new(raw.eigenvalues().iter().map(|p| p.max(0.0)).collect::<Vec<_>>()
            .iter().map(|p| p / raw.eigenvalues().sum()).collect()).unwrap();
        let diff = (shannon_entropy(&spectrum) - von_neumann_entropy(&raw).unwrap()).abs();
        prop_assert!(diff < 1e-12, "diff {diff}");
    }
}

#[test]
fn single_precision_aliases_work() {
    let h = HermitianF32::from_real_diagonal(&[0.0, 1.0]).unwrap();
    let rho: DensityF32 = gibbs_state(&h, InverseTemperature::new(1.0f32).unwrap()).unwrap();
    let s = von_neumann_entropy(&rho).unwrap();
    assert!((s - 0.582_203_1).abs() < 1e-5, "{s}");
    let _ = HermitianOperator::<f32>::zeros(3).unwrap();
}
