//! Dissipation and ledger invariants of the collision model.

use colmix::operators::commutator_norm;
use colmix::{
    collision_energy_transfer, gibbs_state, random_haar_unitary, random_hermitian, run_collision_sequence,
    thermo_entropy_production, CollisionSpec, InverseTemperature,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dissipation_is_positive_and_equals_relative_entropy(seed in any::<u64>(), d in 2usize..=6, beta in 1e-3f64..=5.0) {
        let h = random_hermitian::<f64>(seed, d).unwrap();
        let u = random_haar_unitary::<f64>(seed ^ 0x55, d).unwrap();
        let beta = InverseTemperature::new(beta).unwrap();
        let rho = gibbs_state(&h, beta).unwrap();
        prop_assume!(commutator_norm(u.matrix(), h.matrix()) > 1e-6);
        prop_assert!(collision_energy_transfer(&rho, &u, &h).unwrap() > 0.0);
        // Errors with IdentityViolation when the relative error exceeds 1e-9.
        prop_assert!(thermo_entropy_production(&rho, &u, &h, beta).is_ok());
    }

    #[test]
    fn ledger_columns_are_exact(seed in any::<u64>(), d in 2usize..=5, n in 1usize..=40, frac in 0.0f64..1.0, beta in 0.1f64..3.0) {
        let k = 1 + ((n - 1) as f64 * frac) as usize;
        let h = random_hermitian::<f64>(seed, d).unwrap();
        let u = random_haar_unitary::<f64>(seed ^ 0x77, d).unwrap();
        let spec = CollisionSpec::new(h, InverseTemperature::new(beta).unwrap(), u, k, n).unwrap();
        let ledger = run_collision_sequence(&spec).unwrap();
        prop_assert_eq!(ledger.rows.len(), k);
        for row in &ledger.rows {
            prop_assert_eq!(row.reservoir_entropy.to_bits(), ledger.initial_entropy.to_bits());
            prop_assert_eq!(row.cum_dirr_s.to_bits(), (row.index as f64 * row.dirr_s).to_bits());
            prop_assert_eq!(row.cum_delta_e.to_bits(), (row.index as f64 * row.delta_e).to_bits());
        }
        prop_assert!(ledger.identity_residual <= 1e-9 * ledger.relative_entropy.abs() + 1e-13);
    }
}
