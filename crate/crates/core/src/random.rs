//! Seeded random test instances.

use nalgebra::{Complex, ComplexField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::operators::{DensityOperator, HermitianOperator, UnitaryOperator};
use crate::scalar::{CMatrix, Real};

/// Matrix with independent standard complex Gaussian entries (real and
/// imaginary parts each `N(0, 1)`), drawn in `f64` so every scalar type sees
/// the same instance for a given seed.
fn ginibre<T: Real>(rng: &mut ChaCha8Rng, d: usize) -> CMatrix<T> {
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            m[(i, j)] = Complex::new(T::lit(re), T::lit(im));
        }
    }
    m
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

/// `(A + A^dagger)/2` for a seeded Gaussian `A`.
pub fn random_hermitian<T: Real>(seed: u64, d: usize) -> Result<HermitianOperator<T>> {
    check_dim(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = ginibre::<T>(&mut rng, d);
    let h = (&a + a.adjoint()) * Complex::new(T::lit(0.5), T::zero());
    Ok(HermitianOperator::from_trusted(h))
}

/// Haar-distributed unitary: QR of a seeded Gaussian matrix with the phases of
/// `diag(R)` absorbed into `Q`.
pub fn random_haar_unitary<T: Real>(seed: u64, d: usize) -> Result<UnitaryOperator<T>> {
    check_dim(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = ginibre::<T>(&mut rng, d);
    let qr = a.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let modulus = rjj.modulus();
        let phase = if modulus > T::zero() {
            rjj / Complex::new(modulus, T::zero())
        } else {
            Complex::new(T::one(), T::zero())
        };
        for z in q.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    Ok(UnitaryOperator::from_trusted(q))
}

/// Full-rank density matrix `G G^dagger / tr(G G^dagger)` (Hilbert-Schmidt measure).
pub fn random_density<T: Real>(seed: u64, d: usize) -> Result<DensityOperator<T>> {
    check_dim(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ginibre::<T>(&mut rng, d);
    let mut m = &g * g.adjoint();
    let tr = m.trace().re;
    m /= Complex::new(tr, T::zero());
    crate::operators::hermitize(&mut m);
    DensityOperator::new(m)
}
