//! Dense construction of the symmetrized state and the permutation twirl.

use nalgebra::{Complex, DMatrix};
use num_traits::Zero;

use super::{require_full_rank, MixingMethod, MixingRecord, Representation, SymmetrizedMixture};
use crate::collision::checked_power;
use crate::entropy::{relative_entropy, spectrum_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::operators::{hermitian_eigenvalues, kron, DensityOperator};
use crate::scalar::{c, CMatrix, Real};

/// Largest `d^N` handled densely unless the caller raises it.
pub const DEFAULT_DENSE_CAP: usize = 4096;

fn dense_dim(d: usize, molecules: usize, cap: usize) -> Result<usize> {
    match checked_power(d, molecules) {
        Some(dim) if dim <= cap => Ok(dim),
        other => Err(Error::DenseCapExceeded { dim: other.unwrap_or(usize::MAX), cap }),
    }
}

/// Sparse Hermitian `d^N x d^N` matrix expressed in the tensor-power basis of
/// `basis` (the eigenbasis of rho). Row `s` lists its nonzero `(column, value)`.
#[derive(Clone, Debug)]
pub struct DenseMixture<T: Real> {
    molecules: usize,
    basis: CMatrix<T>,
    rows: Vec<Vec<(usize, Complex<T>)>>,
}

impl<T: Real> DenseMixture<T> {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn nonzeros(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Single-molecule change of basis (columns are rho's eigenvectors).
    pub fn basis(&self) -> &CMatrix<T> {
        &self.basis
    }

    /// The full matrix in rho's eigenbasis.
    pub fn to_dense(&self) -> CMatrix<T> {
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// The full matrix in the computational basis, `W R W^dagger` with `W = basis^{⊗N}`.
    pub fn computational_matrix(&self) -> CMatrix<T> {
        let mut w = self.basis.clone();
        for _ in 1..self.molecules {
            w = kron(&w, &self.basis);
        }
        let mut m = &w * self.to_dense() * w.adjoint();
        crate::operators::hermitize(&mut m);
        m
    }

    /// Splits the index set into connected components of the sparsity graph.
    fn blocks(&self) -> Vec<Vec<usize>> {
        let n = self.dim();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, _) in row {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..n {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// All `d^N` eigenvalues, ascending.
    ///
    /// The matrix is exactly block diagonal over the connected components of its
    /// sparsity pattern; each block is densified and diagonalized on its own.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        let mut out = Vec::with_capacity(self.dim());
        for block in self.blocks() {
            if block.len() == 1 {
                let i = block[0];
                let v = self.rows[i].iter().find(|(j, _)| *j == i).map_or(T::zero(), |&(_, z)| z.re);
                out.push(v);
                continue;
            }
            let pos: std::collections::HashMap<usize, usize> = block.iter().enumerate().map(|(k, &i)| (i, k)).collect();
            let m = block.len();
            let mut dense = CMatrix::<T>::zeros(m, m);
            let mut real = true;
            for (k, &i) in block.iter().enumerate() {
                for &(j, v) in &self.rows[i] {
                    dense[(k, pos[&j])] = v;
                    real &= v.im == T::zero();
                }
            }
            if real {
                let re = DMatrix::<T>::from_fn(m, m, |i, j| dense[(i, j)].re);
                out.extend(re.symmetric_eigenvalues().iter().copied());
            } else {
                out.extend(hermitian_eigenvalues(&dense));
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        Ok(out)
    }
}

/// Orthonormal eigenbasis of rho and its eigenvalues in the same column order.
/// A diagonal rho keeps the computational basis.
fn rho_basis<T: Real>(rho: &DensityOperator<T>) -> (CMatrix<T>, Vec<T>) {
    let d = rho.dim();
    if rho.is_diagonal() {
        (CMatrix::identity(d, d), (0..d).map(|i| rho.matrix()[(i, i)].re).collect())
    } else {
        (rho.eigenvectors().clone(), rho.eigenvalues().iter().copied().collect())
    }
}

/// Entries of `sigma` in rho's basis at or below this fraction of its largest
/// entry are rounding noise of the basis change and are dropped, so that a
/// commuting pair keeps its exact block structure.
pub const BASIS_NOISE_TOL: f64 = 1e-14;

/// `W^dagger sigma W`, hermitized, with rounding noise removed (including
/// imaginary residue of real entries).
fn basis_change_cleaned<T: Real>(sigma: &CMatrix<T>, basis: &CMatrix<T>) -> CMatrix<T> {
    let mut s = basis.adjoint() * sigma * basis;
    crate::operators::hermitize(&mut s);
    let floor = T::tol(BASIS_NOISE_TOL) * crate::operators::max_abs(&s);
    for z in s.iter_mut() {
        if z.re.abs() <= floor {
            z.re = T::zero();
        }
        if z.im.abs() <= floor {
            z.im = T::zero();
        }
    }
    s
}

/// `R = (1/N) sum_k rho^{⊗k} ⊗ sigma ⊗ rho^{⊗(N-1-k)}`, `N = n + 1`.
///
/// Built in rho's eigenbasis, where each row has at most `N(d-1) + 1` nonzeros.
pub fn symmetrized_state_dense<T: Real>(
    sigma: &DensityOperator<T>,
    rho: &DensityOperator<T>,
    n: usize,
    cap: usize,
) -> Result<SymmetrizedMixture<T>> {
    let d = rho.dim();
    if sigma.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: sigma.dim() });
    }
    let molecules = n + 1;
    let dim = dense_dim(d, molecules, cap)?;
    let (basis, r) = rho_basis(rho);
    let s = basis_change_cleaned(sigma.matrix(), &basis);
    let inv_n = T::one() / T::from_usize_lossy(molecules);

    let mut digits = vec![0usize; molecules];
    let mut prefix = vec![T::one(); molecules + 1];
    let mut suffix = vec![T::one(); molecules + 1];
    let mut rows = Vec::with_capacity(dim);
    for idx in 0..dim {
        // Position 0 is the most significant digit (first molecule).
        let mut rem = idx;
        for pos in (0..molecules).rev() {
            digits[pos] = rem % d;
            rem /= d;
        }
        for pos in 0..molecules {
            prefix[pos + 1] = prefix[pos] * r[digits[pos]];
        }
        for pos in (0..molecules).rev() {
            suffix[pos] = suffix[pos + 1] * r[digits[pos]];
        }
        let mut row: Vec<(usize, Complex<T>)> = Vec::with_capacity(molecules * (d - 1) + 1);
        let mut diag = Complex::zero();
        let mut stride = dim / d;
        for pos in 0..molecules {
            let others = prefix[pos] * suffix[pos + 1] * inv_n;
            let a = digits[pos];
            diag += s[(a, a)] * c(others);
            for b in 0..d {
                if b == a {
                    continue;
                }
                let v = s[(a, b)] * c(others);
                if v != Complex::zero() {
                    let col = idx + b * stride - a * stride;
                    row.push((col, v));
                }
            }
            stride /= d.max(1);
        }
        if diag != Complex::zero() {
            row.push((idx, diag));
        }
        row.sort_by_key(|&(j, _)| j);
        rows.push(row);
    }
    Ok(SymmetrizedMixture {
        d,
        molecules,
        representation: Representation::Dense(DenseMixture { molecules, basis, rows }),
    })
}

/// Entropy of mixing by full diagonalization of the symmetrized state.
pub fn mixing_entropy_dense<T: Real>(
    sigma: &DensityOperator<T>,
    rho: &DensityOperator<T>,
    n: usize,
    cap: usize,
) -> Result<MixingRecord<T>> {
    require_full_rank(rho)?;
    let mixture = symmetrized_state_dense(sigma, rho, n, cap)?;
    let Representation::Dense(dense) = &mixture.representation else { unreachable!() };
    let s_r = spectrum_entropy(dense.eigenvalues()?)?;
    let s_rho = von_neumann_entropy(rho)?;
    let s_sigma = von_neumann_entropy(sigma)?;
    let s_mix = s_r - T::from_usize_lossy(n) * s_rho - s_sigma;
    let s_rel = relative_entropy(sigma, rho)?;
    Ok(MixingRecord::new(n, 1, s_mix, s_rel, MixingMethod::Dense))
}

fn infer_local_dim(dim: usize, molecules: usize) -> Result<usize> {
    if molecules == 0 {
        return Err(Error::InvalidArgument("need at least one subsystem".into()));
    }
    let guess = (dim as f64).powf(1.0 / molecules as f64).round() as usize;
    for d in guess.saturating_sub(1)..=guess + 1 {
        if d >= 1 && checked_power(d, molecules) == Some(dim) {
            return Ok(d);
        }
    }
    Err(Error::InvalidArgument(format!("dimension {dim} is not a {molecules}-th power")))
}

/// Index map of the subsystem permutation `perm`: digit `j` of the image is digit `perm[j]` of the source.
fn permuted_indices(d: usize, perm: &[usize], dim: usize) -> Vec<usize> {
    let molecules = perm.len();
    let mut digits = vec![0usize; molecules];
    (0..dim)
        .map(|idx| {
            let mut rem = idx;
            for pos in (0..molecules).rev() {
                digits[pos] = rem % d;
                rem /= d;
            }
            perm.iter().fold(0usize, |acc, &src| acc * d + digits[src])
        })
        .collect()
}

/// Conjugation `P X P^dagger` by the permutation swapping subsystems `k` and `k+1`.
pub fn adjacent_transposition<T: Real>(x: &CMatrix<T>, molecules: usize, k: usize) -> Result<CMatrix<T>> {
    let dim = x.nrows();
    let d = infer_local_dim(dim, molecules)?;
    if k + 1 >= molecules {
        return Err(Error::InvalidArgument(format!("no subsystem pair ({k}, {})", k + 1)));
    }
    let mut perm: Vec<usize> = (0..molecules).collect();
    perm.swap(k, k + 1);
    let map = permuted_indices(d, &perm, dim);
    Ok(CMatrix::from_fn(dim, dim, |i, j| x[(map[i], map[j])]))
}

/// Maximum number of subsystems the twirl enumerates (`8! = 40320` permutations).
pub const MAX_TWIRL_MOLECULES: usize = 8;

/// `(1/N!) sum_pi P_pi X P_pi^dagger` over all permutations of the `N` subsystems.
pub fn permutation_twirl_dense<T: Real>(x: &CMatrix<T>, molecules: usize, cap: usize) -> Result<CMatrix<T>> {
    let dim = x.nrows();
    if x.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: x.ncols() });
    }
    if dim > cap {
        return Err(Error::DenseCapExceeded { dim, cap });
    }
    if molecules > MAX_TWIRL_MOLECULES {
        return Err(Error::InvalidArgument(format!(
            "twirl over {molecules} subsystems exceeds the {MAX_TWIRL_MOLECULES}-subsystem enumeration limit"
        )));
    }
    let d = infer_local_dim(dim, molecules)?;
    let mut acc = CMatrix::<T>::zeros(dim, dim);
    let mut perm: Vec<usize> = (0..molecules).collect();
    let mut count = 0usize;
    loop {
        let map = permuted_indices(d, &perm, dim);
        for j in 0..dim {
            for i in 0..dim {
                acc[(i, j)] += x[(map[i], map[j])];
            }
        }
        count += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let scale = c(T::one() / T::from_usize_lossy(count));
    Ok(acc * scale)
}

/// Advances `p` to the next lexicographic permutation; false after the last one.
fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
