//! Finite-dimensional operators: Hamiltonians, density operators, unitaries,
//! inverse temperatures and classical distributions.

use nalgebra::{Complex, ComplexField, DMatrix, SymmetricEigen};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{c, CMatrix, RVector, Real};

/// Elementwise Hermiticity tolerance for unit-scale matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unit-trace tolerance for density operators.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues in `[-EIGEN_FLOOR, 0)` are rounding noise and clamp to zero.
pub const EIGEN_FLOOR: f64 = 1e-10;
/// Elementwise tolerance on `U^dagger U - I`.
pub const UNITARY_TOL: f64 = 1e-12;
/// Tolerance on the sum of a classical distribution.
pub const DISTRIBUTION_TOL: f64 = 1e-12;

pub(crate) fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

pub(crate) fn hermitian_deviation<T: Real>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut dev = T::zero();
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).modulus());
        }
    }
    dev
}

/// Replaces `m` by `(m + m^dagger)/2`.
pub(crate) fn hermitize<T: Real>(m: &mut CMatrix<T>) {
    let n = m.nrows();
    let half = T::lit(0.5);
    for i in 0..n {
        m[(i, i)] = c(m[(i, i)].re);
        for j in (i + 1)..n {
            let v = (m[(i, j)] + m[(j, i)].conj()) * half;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted ascending.
pub(crate) fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> (RVector<T>, CMatrix<T>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values = RVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Eigenvalues only (ascending) of a Hermitian matrix.
pub(crate) fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let mut v: Vec<T> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// Kronecker product `a ⊗ b`.
pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

/// `V diag(values) V^dagger`.
pub(crate) fn from_spectrum<T: Real>(values: &RVector<T>, vectors: &CMatrix<T>) -> CMatrix<T> {
    let mut scaled = vectors.clone();
    for (j, &lambda) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(lambda);
    }
    let mut m = &scaled * vectors.adjoint();
    hermitize(&mut m);
    m
}

/// Frobenius norm of the commutator `[a, b]`.
pub fn commutator_norm<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    (a * b - b * a).norm()
}

fn check_square<T: Real>(m: &CMatrix<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    if m.nrows() == 0 {
        return Err(Error::InvalidDimension(0));
    }
    Ok(m.nrows())
}

/// A Hermitian operator such as a Hamiltonian or an observable.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> HermitianOperator<T> {
    /// Validates Hermiticity to `1e-12` relative to `max(1, max|entry|)`.
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        check_square(&matrix)?;
        let scale = T::one().max(max_abs(&matrix));
        let dev = hermitian_deviation(&matrix);
        if !(dev <= T::tol(HERMITIAN_TOL) * scale) {
            return Err(Error::NotHermitian(dev.as_f64()));
        }
        let mut matrix = matrix;
        hermitize(&mut matrix);
        Ok(Self { matrix })
    }

    pub fn from_real_diagonal(diag: &[T]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        let n = diag.len();
        Ok(Self { matrix: CMatrix::from_fn(n, n, |i, j| if i == j { c(diag[i]) } else { Complex::zero() }) })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self { matrix: CMatrix::zeros(dim, dim) })
    }

    pub(crate) fn from_trusted(mut matrix: CMatrix<T>) -> Self {
        hermitize(&mut matrix);
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    /// Eigenvalues ascending with the matching eigenvectors as columns.
    pub fn eigen(&self) -> (RVector<T>, CMatrix<T>) {
        hermitian_eigen(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        hermitian_eigenvalues(&self.matrix)
    }
}

/// A positive semidefinite, unit-trace operator.
///
/// The spectral decomposition is computed (or inherited) at construction and
/// kept alongside the matrix, so entropies never re-diagonalize.
#[derive(Clone, Debug)]
pub struct DensityOperator<T: Real> {
    matrix: CMatrix<T>,
    eigenvalues: RVector<T>,
    eigenvectors: CMatrix<T>,
}

impl<T: Real> DensityOperator<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let n = check_square(&matrix)?;
        let dev = hermitian_deviation(&matrix);
        if !(dev <= T::tol(HERMITIAN_TOL)) {
            return Err(Error::NotHermitian(dev.as_f64()));
        }
        let trace = (0..n).fold(T::zero(), |acc, i| acc + matrix[(i, i)].re);
        if !((trace - T::one()).abs() <= T::tol(TRACE_TOL)) {
            return Err(Error::TraceNotUnity(trace.as_f64()));
        }
        let mut matrix = matrix;
        hermitize(&mut matrix);
        let (eigenvalues, eigenvectors) = hermitian_eigen(&matrix);
        if eigenvalues[0] < -T::tol(EIGEN_FLOOR) {
            return Err(Error::NegativeEigenvalue(eigenvalues[0].as_f64()));
        }
        Ok(Self { matrix, eigenvalues, eigenvectors })
    }

    /// Builds `V diag(p) V^dagger` from a known spectral decomposition.
    pub(crate) fn from_spectral(eigenvalues: RVector<T>, eigenvectors: CMatrix<T>) -> Self {
        let matrix = from_spectrum(&eigenvalues, &eigenvectors);
        Self { matrix, eigenvalues, eigenvectors }
    }

    /// The diagonal state `diag(p)`.
    pub fn diagonal(p: &ClassicalDistribution<T>) -> Self {
        let n = p.dim();
        let values = RVector::from_iterator(n, p.probabilities().iter().copied());
        let matrix = CMatrix::from_fn(n, n, |i, j| if i == j { c(p.probabilities()[i]) } else { Complex::zero() });
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        let eigenvalues = RVector::from_iterator(n, order.iter().map(|&k| values[k]));
        let eigenvectors =
            CMatrix::from_fn(
                n,
                n,
                |i, j| if i == order[j] { Complex::new(T::one(), T::zero()) } else { Complex::zero() },
            );
        Self { matrix, eigenvalues, eigenvectors }
    }

    /// The maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let p = ClassicalDistribution::uniform(dim)?;
        Ok(Self::diagonal(&p))
    }

    /// The pure state `|k><k|` in the computational basis.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidArgument(format!("basis index {k} out of range for dimension {dim}")));
        }
        let mut p = vec![T::zero(); dim];
        p[k] = T::one();
        Ok(Self::diagonal(&ClassicalDistribution::new(p)?))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// Eigenvalues in ascending order (unclamped).
    pub fn eigenvalues(&self) -> &RVector<T> {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors, one per column, matching [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &CMatrix<T> {
        &self.eigenvectors
    }

    /// True when the matrix is exactly diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.matrix[(i, j)] == Complex::zero()))
    }

    /// Max elementwise distance to another operator of the same dimension.
    pub fn max_distance(&self, other: &Self) -> T {
        max_abs(&(&self.matrix - &other.matrix))
    }
}

/// A unitary matrix, e.g. the collision `U`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> UnitaryOperator<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let n = check_square(&matrix)?;
        let gram = matrix.adjoint() * &matrix;
        let dev = max_abs(&(gram - CMatrix::<T>::identity(n, n)));
        if !(dev <= T::tol(UNITARY_TOL)) {
            return Err(Error::NotUnitary(dev.as_f64()));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self { matrix: CMatrix::identity(dim, dim) })
    }

    /// The permutation matrix sending basis vector `j` to `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut m = CMatrix::zeros(n, n);
        for (j, &p) in perm.iter().enumerate() {
            m[(p, j)] = Complex::new(T::one(), T::zero());
        }
        Ok(Self { matrix: m })
    }

    /// The 2x2 exchange (Pauli X) matrix.
    pub fn exchange() -> Self {
        Self::permutation(&[1, 0]).expect("valid permutation")
    }

    pub(crate) fn from_trusted(matrix: CMatrix<T>) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }
}

/// Inverse temperature `beta`, in inverse energy units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InverseTemperature<T: Real>(T);

impl<T: Real> InverseTemperature<T> {
    /// Any finite value is accepted; negative values describe population-inverted states.
    pub fn new(beta: T) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::NonFiniteBeta(beta.as_f64()));
        }
        Ok(Self(beta))
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn is_positive(self) -> bool {
        self.0 > T::zero()
    }
}

/// A probability vector over `d` outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalDistribution<T: Real> {
    p: Vec<T>,
}

impl<T: Real> ClassicalDistribution<T> {
    pub fn new(p: Vec<T>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(bad) = p.iter().find(|x| !(**x >= T::zero()) || !x.is_finite()) {
            return Err(Error::InvalidDistribution(format!("entry {bad} is negative or not finite")));
        }
        let total = p.iter().fold(T::zero(), |acc, &x| acc + x);
        if !((total - T::one()).abs() <= T::tol(DISTRIBUTION_TOL)) {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        Ok(Self { p })
    }

    pub fn uniform(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self { p: vec![T::one() / T::from_usize_lossy(dim); dim] })
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn probabilities(&self) -> &[T] {
        &self.p
    }

    /// True when every entry is strictly positive.
    pub fn is_full_support(&self) -> bool {
        self.p.iter().all(|&x| x > T::zero())
    }
}

/// Dense complex matrix from separate real and imaginary row-major parts.
pub fn matrix_from_parts<T: Real>(re: &[Vec<T>], im: &[Vec<T>]) -> Result<CMatrix<T>> {
    let n = re.len();
    if im.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: im.len() });
    }
    for row in re.iter().chain(im.iter()) {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| Complex::new(re[i][j], im[i][j])))
}
