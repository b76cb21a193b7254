//! Entropy functionals, all in nats.

use crate::error::{Error, Result};
use crate::operators::{ClassicalDistribution, DensityOperator, HermitianOperator, EIGEN_FLOOR};
use crate::scalar::{CompensatedSum, Real};

/// Overlap weight below which a direction counts as outside the support of sigma.
pub const SUPPORT_TOL: f64 = 1e-12;

/// `-sum p ln p` over a spectrum, clamping `[-1e-10, 0)` to zero.
pub fn spectrum_entropy<T: Real>(values: impl IntoIterator<Item = T>) -> Result<T> {
    let floor = -T::tol(EIGEN_FLOOR);
    let mut acc = CompensatedSum::default();
    for x in values {
        if x < floor || !x.is_finite() {
            return Err(Error::NegativeEigenvalue(x.as_f64()));
        }
        if x > T::zero() {
            acc.add(-(x * x.ln()));
        }
    }
    Ok(acc.value())
}

/// Von Neumann entropy `-tr(rho ln rho)`.
pub fn von_neumann_entropy<T: Real>(rho: &DensityOperator<T>) -> Result<T> {
    spectrum_entropy(rho.eigenvalues().iter().copied())
}

/// Shannon entropy `-sum_a p_a ln p_a`.
pub fn shannon_entropy<T: Real>(p: &ClassicalDistribution<T>) -> T {
    spectrum_entropy(p.probabilities().iter().copied()).expect("validated distribution is non-negative")
}

/// Relative entropy `S[sigma|rho] = -tr(sigma ln rho) - S[sigma]`.
///
/// `tr(sigma ln rho)` is evaluated in the eigenbasis of `rho` as
/// `sum_j ln(mu_j) <v_j|sigma|v_j>`, with the diagonal of sigma taken from its
/// own spectral decomposition. A direction with `mu_j = 0` that sigma populates
/// makes the result infinite and is reported as an error.
pub fn relative_entropy<T: Real>(sigma: &DensityOperator<T>, rho: &DensityOperator<T>) -> Result<T> {
    if sigma.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let overlap = rho.eigenvectors().adjoint() * sigma.eigenvectors();
    let floor = T::tol(EIGEN_FLOOR);
    let mut cross = CompensatedSum::default();
    for (j, &mu) in rho.eigenvalues().iter().enumerate() {
        if mu < -floor {
            return Err(Error::NegativeEigenvalue(mu.as_f64()));
        }
        let mut weight = T::zero();
        for (i, &lambda) in sigma.eigenvalues().iter().enumerate() {
            if lambda > T::zero() {
                weight += lambda * overlap[(j, i)].norm_sqr();
            }
        }
        if mu <= T::zero() {
            if weight > T::tol(SUPPORT_TOL) {
                return Err(Error::InfiniteRelativeEntropy);
            }
            continue;
        }
        cross.add(-(weight * mu.ln()));
    }
    let value = cross.value() - von_neumann_entropy(sigma)?;
    // Klein's inequality: tiny negative values are cancellation noise.
    if value < T::zero() && value > -T::tol(1e-12) {
        return Ok(T::zero());
    }
    Ok(value)
}

/// `Re tr(rho H)`.
pub fn energy_mean<T: Real>(rho: &DensityOperator<T>, h: &HermitianOperator<T>) -> Result<T> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: h.dim() });
    }
    let n = rho.dim();
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    for i in 0..n {
        for k in 0..n {
            let z = rho.matrix()[(i, k)] * h.matrix()[(k, i)];
            re.add(z.re);
            im.add(z.im);
        }
    }
    if im.value().abs() >= T::tol(1e-10) {
        return Err(Error::InvalidArgument(format!("tr(rho H) has imaginary residue {}", im.value())));
    }
    Ok(re.value())
}

/// Converts nats to bits.
pub fn nats_to_bits<T: Real>(x: T) -> T {
    x / T::ln_2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{matrix_from_parts, UnitaryOperator};
    use crate::state::apply_unitary;
    use std::f64::consts::LN_2;

    fn diag(p: &[f64]) -> DensityOperator<f64> {
        DensityOperator::diagonal(&ClassicalDistribution::new(p.to_vec()).unwrap())
    }

    #[test]
    fn von_neumann_examples() {
        assert_eq!(von_neumann_entropy(&DensityOperator::<f64>::basis_state(2, 0).unwrap()).unwrap(), 0.0);
        for d in 2..6 {
            let s = von_neumann_entropy(&DensityOperator::<f64>::maximally_mixed(d).unwrap()).unwrap();
            assert!((s - (d as f64).ln()).abs() < 1e-14);
        }
        let s: f64 = von_neumann_entropy(&diag(&[0.75, 0.25])).unwrap();
        let oracle = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        assert!((s - oracle).abs() < 1e-15);
        assert!((s - 0.5623).abs() < 5e-5);
    }

    #[test]
    fn von_neumann_of_non_diagonal_pure_state() {
        let h = 0.5f64;
        let m = matrix_from_parts(&[vec![h, h], vec![h, h]], &[vec![0.0; 2], vec![0.0; 2]]).unwrap();
        let rho = DensityOperator::new(m).unwrap();
        assert!(von_neumann_entropy(&rho).unwrap().abs() < 1e-14);
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_entropy(&ClassicalDistribution::new(vec![1.0, 0.0]).unwrap()), 0.0);
        assert!((shannon_entropy(&ClassicalDistribution::new(vec![0.5, 0.5]).unwrap()) - LN_2).abs() < 1e-15);
        let s: f64 = shannon_entropy(&ClassicalDistribution::new(vec![0.75, 0.25]).unwrap());
        assert!((s - 0.5623).abs() < 5e-5);
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = diag(&[0.75, 0.25]);
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-15);
        let s = relative_entropy(&diag(&[1.0, 0.0]), &diag(&[0.5, 0.5])).unwrap();
        assert!((s - LN_2).abs() < 1e-15);
        let s = relative_entropy(&diag(&[0.25, 0.75]), &rho).unwrap();
        let oracle = 0.25 * (0.25f64 / 0.75).ln() + 0.75 * (0.75f64 / 0.25).ln();
        assert!((s - oracle).abs() < 1e-15);
        assert!((s - 0.5 * 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn relative_entropy_support_violation() {
        let err = relative_entropy(&diag(&[0.5, 0.5]), &diag(&[1.0, 0.0])).unwrap_err();
        assert_eq!(err, Error::InfiniteRelativeEntropy);
        // Contained support is finite even though rho is singular.
        let s = relative_entropy(&diag(&[1.0, 0.0]), &diag(&[1.0, 0.0])).unwrap();
        assert_eq!(s, 0.0);
        let s = relative_entropy(&diag(&[1.0, 0.0, 0.0]), &diag(&[0.5, 0.5, 0.0])).unwrap();
        assert!((s - LN_2).abs() < 1e-15);
    }

    #[test]
    fn relative_entropy_dimension_mismatch() {
        assert!(matches!(
            relative_entropy(&diag(&[0.5, 0.5]), &diag(&[0.2, 0.3, 0.5])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn energy_mean_examples() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0]).unwrap();
        assert!((energy_mean(&diag(&[0.5, 0.5]), &h).unwrap() - 0.5).abs() < 1e-15);
        let zero = HermitianOperator::zeros(2).unwrap();
        assert_eq!(energy_mean(&diag(&[0.3, 0.7]), &zero).unwrap(), 0.0);
        let z = 1.0 + (-1.0f64).exp();
        let rho = diag(&[1.0 / z, (-1.0f64).exp() / z]);
        let e = energy_mean(&rho, &h).unwrap();
        assert!((e - (-1.0f64).exp() / z).abs() < 1e-15);
        assert!((e - 0.2689).abs() < 5e-5);
        let big = HermitianOperator::zeros(3).unwrap();
        assert!(energy_mean(&rho, &big).is_err());
    }

    #[test]
    fn entropy_rejects_invalid_spectrum() {
        assert!(matches!(spectrum_entropy([1.1f64, -0.1]), Err(Error::NegativeEigenvalue(_))));
        assert!(spectrum_entropy([1.0f64 + 5e-11, -5e-11]).is_ok());
    }

    #[test]
    fn exchange_preserves_entropy() {
        let rho = diag(&[0.9, 0.1]);
        let sigma = apply_unitary(&rho, &UnitaryOperator::exchange()).unwrap();
        assert_eq!(von_neumann_entropy(&rho).unwrap(), von_neumann_entropy(&sigma).unwrap());
    }

    #[test]
    fn bits_conversion() {
        assert!((nats_to_bits(LN_2) - 1.0f64).abs() < 1e-15);
    }

    #[test]
    fn single_precision_smoke() {
        let rho = DensityOperator::<f32>::diagonal(&ClassicalDistribution::new(vec![0.75, 0.25]).unwrap());
        let sigma = DensityOperator::<f32>::diagonal(&ClassicalDistribution::new(vec![0.25, 0.75]).unwrap());
        assert!((von_neumann_entropy(&rho).unwrap() - 0.5623).abs() < 1e-4);
        assert!((relative_entropy(&sigma, &rho).unwrap() - 0.5493).abs() < 1e-4);
    }
}
