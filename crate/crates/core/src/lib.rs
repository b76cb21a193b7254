//! Numerical laboratory for a unitary collision model of friction.
//!
//! A reservoir of distinguishable molecules in a Gibbs state is driven by
//! unitary collisions with an external field. The crate computes the energy
//! transfer and thermodynamic entropy production of those collisions, builds
//! the permutation-symmetrized post-collision reservoir state, and evaluates
//! its entropy of mixing exactly (dense diagonalization for small quantum
//! systems, type-class enumeration for commuting states at large `n`) to
//! compare it with the relative entropy `S[sigma|rho]`.
//!
//! Everything is generic over [`Real`]; the `*F64` / `*F32` aliases below fix
//! the precision (the command-line harness works in `f64`).
//!
//! ```
//! use colmix::{gibbs_state, mixing_entropy, ClassicalDistribution, DensityF64, HermitianF64, InverseTemperature, MixingMethod};
//!
//! # fn main() -> colmix::Result<()> {
//! let h = HermitianF64::from_real_diagonal(&[0.0, 1.0])?;
//! let rho = gibbs_state(&h, InverseTemperature::new(1.0)?)?;
//! assert!((rho.eigenvalues()[1] - 0.7311).abs() < 1e-4);
//!
//! let p = |v: &[f64]| ClassicalDistribution::new(v.to_vec()).map(|d| DensityF64::diagonal(&d));
//! let rec = mixing_entropy(&p(&[0.3, 0.7])?, &p(&[0.7, 0.3])?, 1024, MixingMethod::Auto, 4096)?;
//! assert!(rec.gap > 0.0 && rec.gap < 1e-3);
//! # Ok(())
//! # }
//! ```

// `!(x <= tol)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod collision;
pub mod combinatorics;
pub mod entropy;
pub mod error;
pub mod io;
pub mod mixing;
pub mod operators;
pub mod random;
pub mod scalar;
pub mod state;
pub mod verify;

pub use collision::{
    collision_energy_transfer, reservoir_hamiltonian, run_collision_sequence, thermo_entropy_production,
    CollisionLedger, CollisionRow, CollisionSpec,
};
pub use combinatorics::{
    classical_mixing_increase_formula, insertion_factor, log_multinomial, typicality_entropy_check, InsertionFactor,
    TypeVector, TypicalityCheck,
};
pub use entropy::{energy_mean, relative_entropy, shannon_entropy, von_neumann_entropy};
pub use error::{Error, Result};
pub use mixing::{
    classical_mixing_entropy_exact, classical_mixing_entropy_multi, convergence_sweep, graceful_checks, mixing_entropy,
    permutation_twirl_dense, symmetrized_state_dense, Extrapolation, GracefulReport, MixingMethod, MixingRecord,
    SweepResult, SymmetrizedMixture,
};
pub use operators::{ClassicalDistribution, DensityOperator, HermitianOperator, InverseTemperature, UnitaryOperator};
pub use random::{random_density, random_haar_unitary, random_hermitian};
pub use scalar::Real;
pub use state::{apply_unitary, gibbs_state};

pub type HermitianF64 = HermitianOperator<f64>;
pub type DensityF64 = DensityOperator<f64>;
pub type UnitaryF64 = UnitaryOperator<f64>;
pub type BetaF64 = InverseTemperature<f64>;
pub type DistributionF64 = ClassicalDistribution<f64>;
pub type CollisionSpecF64 = CollisionSpec<f64>;
pub type CollisionLedgerF64 = CollisionLedger<f64>;
pub type MixingRecordF64 = MixingRecord<f64>;
pub type SymmetrizedMixtureF64 = SymmetrizedMixture<f64>;

pub type HermitianF32 = HermitianOperator<f32>;
pub type DensityF32 = DensityOperator<f32>;
pub type UnitaryF32 = UnitaryOperator<f32>;
pub type BetaF32 = InverseTemperature<f32>;
pub type DistributionF32 = ClassicalDistribution<f32>;
pub type MixingRecordF32 = MixingRecord<f32>;
