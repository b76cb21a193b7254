use nalgebra::ComplexField;
use serde::Serialize;

use super::dense::{permutation_twirl_dense, symmetrized_state_dense};
use super::Representation;
use crate::collision::reservoir_hamiltonian;
use crate::error::{Error, Result};
use crate::operators::{kron, max_abs, DensityOperator, HermitianOperator};
use crate::scalar::{CMatrix, Real};

/// Residuals showing the symmetrizing map leaves energy and free dynamics untouched.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GracefulReport {
    /// `|tr(H_R R) - tr(H_R X)|` for `X = sigma ⊗ rho^{⊗n}`.
    pub energy_residual: f64,
    /// `max |M[H_R, X] - [H_R, M X]|`.
    pub commutation_residual: f64,
    /// `max |M X - R|`: the twirl against the direct construction.
    pub twirl_residual: f64,
}

/// `sigma ⊗ rho^{⊗n}` in the computational basis.
pub fn product_state<T: Real>(sigma: &DensityOperator<T>, rho: &DensityOperator<T>, n: usize) -> CMatrix<T> {
    (0..n).fold(sigma.matrix().clone(), |acc, _| kron(&acc, rho.matrix()))
}

pub fn graceful_checks<T: Real>(
    sigma: &DensityOperator<T>,
    rho: &DensityOperator<T>,
    n: usize,
    h: &HermitianOperator<T>,
    cap: usize,
) -> Result<GracefulReport> {
    if sigma.dim() != rho.dim() || h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim().max(h.dim()) });
    }
    let molecules = n + 1;
    let h_r = reservoir_hamiltonian(h, molecules, cap)?;
    let h_r = h_r.matrix();
    let mixture = symmetrized_state_dense(sigma, rho, n, cap)?;
    let Representation::Dense(dense) = &mixture.representation else { unreachable!() };
    let r = dense.computational_matrix();
    let x = product_state(sigma, rho, n);

    let energy_residual = ((h_r * &r).trace() - (h_r * &x).trace()).modulus();

    let mx = permutation_twirl_dense(&x, molecules, cap)?;
    let lhs = permutation_twirl_dense(&(h_r * &x - &x * h_r), molecules, cap)?;
    let rhs = h_r * &mx - &mx * h_r;
    Ok(GracefulReport {
        energy_residual: energy_residual.as_f64(),
        commutation_residual: max_abs(&(lhs - rhs)).as_f64(),
        twirl_residual: max_abs(&(mx - r)).as_f64(),
    })
}
