//! Gibbs states and unitary collisions.

use crate::error::{Error, Result};
use crate::operators::{DensityOperator, HermitianOperator, InverseTemperature, UnitaryOperator};
use crate::scalar::{RVector, Real};

/// The Gibbs state `e^{-beta H} / tr e^{-beta H}`.
///
/// Exponentials are taken on the spectrum of `H` after subtracting the smallest
/// `beta E_i`, so every weight lies in `(0, 1]` and nothing overflows.
pub fn gibbs_state<T: Real>(h: &HermitianOperator<T>, beta: InverseTemperature<T>) -> Result<DensityOperator<T>> {
    let beta = beta.value();
    if !beta.is_finite() {
        return Err(Error::NonFiniteBeta(beta.as_f64()));
    }
    let (energies, vectors) = h.eigen();
    let scaled: Vec<T> = energies.iter().map(|&e| beta * e).collect();
    let shift = scaled.iter().copied().fold(T::lit(f64::INFINITY), |a, b| a.min(b));
    let weights: Vec<T> = scaled.iter().map(|&x| (shift - x).exp()).collect();
    let z = weights.iter().fold(T::zero(), |acc, &w| acc + w);
    let probs = RVector::from_iterator(weights.len(), weights.iter().map(|&w| w / z));
    // Keep eigenvalues ascending: beta > 0 reverses the energy order.
    let n = probs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| probs[a].partial_cmp(&probs[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values = RVector::from_iterator(n, order.iter().map(|&k| probs[k]));
    let vecs = crate::scalar::CMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(DensityOperator::from_spectral(values, vecs))
}

/// The post-collision state `U rho U^dagger`. The spectrum is carried over unchanged.
pub fn apply_unitary<T: Real>(rho: &DensityOperator<T>, u: &UnitaryOperator<T>) -> Result<DensityOperator<T>> {
    if rho.dim() != u.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: u.dim() });
    }
    let vectors = u.matrix() * rho.eigenvectors();
    Ok(DensityOperator::from_spectral(rho.eigenvalues().clone(), vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{max_abs, ClassicalDistribution};
    use crate::random::{random_haar_unitary, random_hermitian};

    fn qubit_h() -> HermitianOperator<f64> {
        HermitianOperator::from_real_diagonal(&[0.0, 1.0]).unwrap()
    }

    #[test]
    fn zero_hamiltonian_gives_maximally_mixed() {
        let h = HermitianOperator::<f64>::zeros(2).unwrap();
        for beta in [0.0, 1.0, -3.0, 40.0] {
            let rho = gibbs_state(&h, InverseTemperature::new(beta).unwrap()).unwrap();
            assert!((rho.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
            assert!(rho.matrix()[(0, 1)].norm() < 1e-15);
        }
    }

    #[test]
    fn infinite_temperature_is_uniform() {
        let h = random_hermitian::<f64>(3, 3).unwrap();
        let rho = gibbs_state(&h, InverseTemperature::new(0.0).unwrap()).unwrap();
        let target = DensityOperator::maximally_mixed(3).unwrap();
        assert!(rho.max_distance(&target) < 1e-14);
    }

    #[test]
    fn qubit_gibbs_weights() {
        let rho = gibbs_state(&qubit_h(), InverseTemperature::new(1.0).unwrap()).unwrap();
        let z = 1.0 + (-1.0f64).exp();
        assert!((rho.matrix()[(0, 0)].re - 1.0 / z).abs() < 1e-15);
        assert!((rho.matrix()[(1, 1)].re - (-1.0f64).exp() / z).abs() < 1e-15);
        assert!((rho.matrix()[(0, 0)].re - 0.7311).abs() < 5e-5);
    }

    #[test]
    fn extreme_beta_does_not_overflow() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0, 2.0]).unwrap();
        for beta in [250.0, -250.0] {
            let rho = gibbs_state(&h, InverseTemperature::new(beta).unwrap()).unwrap();
            assert!(rho.eigenvalues().iter().all(|&x: &f64| x > 0.0 && x.is_finite()));
        }
    }

    #[test]
    fn unitary_action() {
        let rho = gibbs_state(&qubit_h(), InverseTemperature::new(1.0).unwrap()).unwrap();
        let same = apply_unitary(&rho, &UnitaryOperator::identity(2).unwrap()).unwrap();
        assert!(same.max_distance(&rho) < 1e-15);

        let swapped = apply_unitary(&rho, &UnitaryOperator::exchange()).unwrap();
        assert!((swapped.matrix()[(0, 0)].re - rho.matrix()[(1, 1)].re).abs() < 1e-15);
        assert!((swapped.matrix()[(1, 1)].re - rho.matrix()[(0, 0)].re).abs() < 1e-15);

        let mixed = DensityOperator::maximally_mixed(4).unwrap();
        let u = random_haar_unitary::<f64>(5, 4).unwrap();
        assert!(apply_unitary(&mixed, &u).unwrap().max_distance(&mixed) < 1e-14);

        let bad = DensityOperator::diagonal(&ClassicalDistribution::uniform(3).unwrap());
        assert!(matches!(apply_unitary(&bad, &u), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn unitary_preserves_trace() {
        let h = random_hermitian::<f64>(2, 5).unwrap();
        let rho = gibbs_state(&h, InverseTemperature::new(0.8).unwrap()).unwrap();
        let sigma = apply_unitary(&rho, &random_haar_unitary(9, 5).unwrap()).unwrap();
        let tr: f64 = (0..5).map(|i| sigma.matrix()[(i, i)].re).sum();
        assert!((tr - 1.0).abs() < 1e-14);
        assert!(max_abs(&(sigma.matrix() - sigma.matrix().adjoint())) == 0.0);
    }
}
