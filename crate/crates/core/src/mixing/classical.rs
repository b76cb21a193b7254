//! Exact entropy of mixing for commuting states by type-class enumeration.
//!
//! For diagonal states every basis string is an eigenvector of the
//! symmetrized state, and its eigenvalue depends only on the string's type
//! (symbol counts `m`). With one sigma among `N - 1` rhos the eigenvalue is
//!
//! ```text
//! q(m) = prod_a rho_a^{m_a} * (1/N) sum_a m_a sigma_a / rho_a
//! ```
//!
//! with multiplicity `N! / prod_a m_a!`. With `k` sigmas the average over
//! placements replaces the last factor by `e_k(ratios) / C(N, k)`, where `e_k`
//! is the elementary symmetric polynomial of the multiset holding `m_a` copies
//! of `sigma_a / rho_a`. Everything is accumulated in the log domain.

use nalgebra::ComplexField;

use super::{MixingMethod, MixingRecord, Representation, SymmetrizedMixture, COMMUTATION_TOL};
use crate::entropy::{relative_entropy, shannon_entropy};
use crate::error::{Error, Result};
use crate::operators::{hermitian_eigen, ClassicalDistribution, DensityOperator};
use crate::scalar::{log_add_exp, CompensatedSum, Real};

/// Default cap on the number of enumerated type classes.
pub const DEFAULT_TYPE_BUDGET: usize = 100_000_000;
/// Allowed deviation of `sum mult * q` from one.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// `C(N + d - 1, d - 1)`, the number of types of length-`N` strings over `d` symbols.
pub fn type_class_count(d: usize, molecules: usize) -> f64 {
    if d == 0 {
        return 0.0;
    }
    let mut acc = 1.0f64;
    for i in 1..d {
        acc *= (molecules + i) as f64 / i as f64;
    }
    acc.round()
}

pub(crate) fn ln_binomial<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::lit(f64::NEG_INFINITY);
    }
    T::from_usize_lossy(n + 1).log_gamma()
        - T::from_usize_lossy(k + 1).log_gamma()
        - T::from_usize_lossy(n - k + 1).log_gamma()
}

/// Visits every composition of `total` into `d` non-negative parts, in
/// lexicographically decreasing order of the first part.
fn for_each_type(d: usize, total: usize, mut f: impl FnMut(&[usize])) {
    let mut m = vec![0usize; d];
    m[0] = total;
    loop {
        f(&m);
        // Find the rightmost non-last position with a positive count.
        let Some(i) = (0..d.saturating_sub(1)).rev().find(|&i| m[i] > 0) else { return };
        m[i] -= 1;
        let tail: usize = m[i + 1..].iter().sum::<usize>() + 1;
        for x in &mut m[i + 1..] {
            *x = 0;
        }
        m[i + 1] = tail;
    }
}

fn check_budget(d: usize, molecules: usize, budget: usize) -> Result<()> {
    let count = type_class_count(d, molecules);
    if count > budget as f64 {
        return Err(Error::TypeBudgetExceeded { count, budget });
    }
    Ok(())
}

fn check_pair<T: Real>(sigma: &ClassicalDistribution<T>, rho: &ClassicalDistribution<T>) -> Result<()> {
    if sigma.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    if let Some(&min) = rho.probabilities().iter().find(|&&p| !(p > T::zero())) {
        return Err(Error::SingularReference(min.as_f64()));
    }
    Ok(())
}

/// `ln k!` for `k = 0..=n`.
fn ln_factorials<T: Real>(n: usize) -> Vec<T> {
    (0..=n).map(|k| T::from_usize_lossy(k + 1).log_gamma()).collect()
}

/// Log-eigenvalue of the type `m` with `sigma_count` sigma factors, given
/// `ln rho_a`, the ratios `sigma_a / rho_a` (and their logs), and `ln k!`.
struct TypeEigenvalue<T> {
    ln_rho: Vec<T>,
    ratio: Vec<T>,
    ln_ratio: Vec<T>,
    ln_fact: Vec<T>,
    molecules: usize,
    sigma_count: usize,
    ln_norm: T,
}

impl<T: Real> TypeEigenvalue<T> {
    fn new(
        sigma: &ClassicalDistribution<T>,
        rho: &ClassicalDistribution<T>,
        molecules: usize,
        sigma_count: usize,
    ) -> Self {
        let ln_rho: Vec<T> = rho.probabilities().iter().map(|p| p.ln()).collect();
        let ratio: Vec<T> = sigma.probabilities().iter().zip(rho.probabilities()).map(|(&s, &r)| s / r).collect();
        let ln_ratio = ratio.iter().map(|r| r.ln()).collect();
        let ln_fact = ln_factorials(molecules);
        let ln_norm = if sigma_count == 1 {
            T::from_usize_lossy(molecules).ln()
        } else {
            ln_binomial::<T>(molecules, sigma_count)
        };
        Self { ln_rho, ratio, ln_ratio, ln_fact, molecules, sigma_count, ln_norm }
    }

    fn ln_multiplicity(&self, m: &[usize]) -> T {
        let mut acc = CompensatedSum::default();
        acc.add(self.ln_fact[self.molecules]);
        for &k in m {
            acc.add(-self.ln_fact[k]);
        }
        acc.value()
    }

    /// `ln e_k` of the multiset by dynamic programming over symbols.
    fn ln_elementary(&self, m: &[usize]) -> T {
        let k = self.sigma_count;
        let neg_inf = T::lit(f64::NEG_INFINITY);
        let mut e = vec![neg_inf; k + 1];
        e[0] = T::zero();
        for (a, &count) in m.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let top = k.min(count);
            // Coefficients of (1 + r x)^count: C(count, j) r^j.
            let coeff: Vec<T> = (0..=top)
                .map(|j| {
                    if j == 0 {
                        T::zero()
                    } else if self.ratio[a] == T::zero() {
                        neg_inf
                    } else {
                        self.ln_fact[count] - self.ln_fact[j] - self.ln_fact[count - j]
                            + T::from_usize_lossy(j) * self.ln_ratio[a]
                    }
                })
                .collect();
            let mut next = vec![neg_inf; k + 1];
            for (i, &ei) in e.iter().enumerate() {
                if ei == neg_inf {
                    continue;
                }
                for (j, &cj) in coeff.iter().enumerate().take(k - i + 1) {
                    next[i + j] = log_add_exp(next[i + j], ei + cj);
                }
            }
            e = next;
        }
        e[k]
    }

    /// `ln q(m)`; `-inf` when the type has zero weight.
    fn ln_eigenvalue(&self, m: &[usize]) -> T {
        let mut base = CompensatedSum::default();
        for (&k, &lr) in m.iter().zip(&self.ln_rho) {
            if k > 0 {
                base.add(T::from_usize_lossy(k) * lr);
            }
        }
        let mix = if self.sigma_count == 1 {
            let w = m.iter().zip(&self.ratio).fold(T::zero(), |acc, (&k, &r)| acc + T::from_usize_lossy(k) * r);
            if w == T::zero() {
                return T::lit(f64::NEG_INFINITY);
            }
            w.ln()
        } else {
            self.ln_elementary(m)
        };
        base.value() + mix - self.ln_norm
    }
}

/// Streams `S[R] = -sum mult q ln q` and the normalization `sum mult q`.
fn entropy_over_types<T: Real>(d: usize, eig: &TypeEigenvalue<T>) -> Result<T> {
    let neg_inf = T::lit(f64::NEG_INFINITY);
    let mut entropy = CompensatedSum::default();
    let mut norm = CompensatedSum::default();
    for_each_type(d, eig.molecules, |m| {
        let ln_q = eig.ln_eigenvalue(m);
        if ln_q == neg_inf {
            return;
        }
        let weight = (eig.ln_multiplicity(m) + ln_q).exp();
        norm.add(weight);
        entropy.add(-(weight * ln_q));
    });
    let total = norm.value();
    if !((total - T::one()).abs() <= T::tol(NORMALIZATION_TOL)) {
        return Err(Error::IdentityViolation { lhs: total.as_f64(), rhs: 1.0 });
    }
    Ok(entropy.value())
}

/// Exact entropy of mixing of one sigma into `n` copies of rho (diagonal states).
pub fn classical_mixing_entropy_exact<T: Real>(
    sigma: &ClassicalDistribution<T>,
    rho: &ClassicalDistribution<T>,
    n: usize,
) -> Result<MixingRecord<T>> {
    classical_mixing_entropy_exact_with_budget(sigma, rho, n, DEFAULT_TYPE_BUDGET)
}

pub fn classical_mixing_entropy_exact_with_budget<T: Real>(
    sigma: &ClassicalDistribution<T>,
    rho: &ClassicalDistribution<T>,
    n: usize,
    budget: usize,
) -> Result<MixingRecord<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need n >= 1 rho-molecules".into()));
    }
    multi_record(sigma, rho, n + 1, 1, budget)
}

/// Exact entropy of the uniform mixture over all placements of `sigma_count`
/// sigma factors among `molecules` slots.
pub fn classical_mixing_entropy_multi<T: Real>(
    sigma: &ClassicalDistribution<T>,
    rho: &ClassicalDistribution<T>,
    molecules: usize,
    sigma_count: usize,
) -> Result<MixingRecord<T>> {
    classical_mixing_entropy_multi_with_budget(sigma, rho, molecules, sigma_count, DEFAULT_TYPE_BUDGET)
}

pub fn classical_mixing_entropy_multi_with_budget<T: Real>(
    sigma: &ClassicalDistribution<T>,
    rho: &ClassicalDistribution<T>,
    molecules: usize,
    sigma_count: usize,
    budget: usize,
) -> Result<MixingRecord<T>> {
    if sigma_count == 0 || sigma_count > molecules {
        return Err(Error::InvalidArgument(format!("sigma count {sigma_count} must lie in 1..={molecules}")));
    }
    multi_record(sigma, rho, molecules, sigma_count, budget)
}

fn multi_record<T: Real>(
    sigma: &ClassicalDistribution<T>,
    rho: &ClassicalDistribution<T>,
    molecules: usize,
    sigma_count: usize,
    budget: usize,
) -> Result<MixingRecord<T>> {
    check_pair(sigma, rho)?;
    check_budget(rho.dim(), molecules, budget)?;
    let eig = TypeEigenvalue::new(sigma, rho, molecules, sigma_count);
    let s_r = entropy_over_types(rho.dim(), &eig)?;
    let n = molecules - sigma_count;
    let s_mix =
        s_r - T::from_usize_lossy(n) * shannon_entropy(rho) - T::from_usize_lossy(sigma_count) * shannon_entropy(sigma);
    let s_rel = relative_entropy(&DensityOperator::diagonal(sigma), &DensityOperator::diagonal(rho))?;
    Ok(MixingRecord::new(n, sigma_count, s_mix, T::from_usize_lossy(sigma_count) * s_rel, MixingMethod::ClassicalExact))
}

/// One type class of the symmetrized state.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeClassEntry<T> {
    pub counts: Vec<usize>,
    pub ln_eigenvalue: T,
    pub ln_multiplicity: T,
}

impl<T: Real> TypeClassEntry<T> {
    pub fn eigenvalue(&self) -> T {
        self.ln_eigenvalue.exp()
    }

    /// Multiplicity as a float; exact for multiplicities below `2^53`.
    pub fn multiplicity(&self) -> T {
        self.ln_multiplicity.exp().round()
    }
}

/// Materialized spectrum `{type -> (eigenvalue, multiplicity)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeClassSpectrum<T> {
    pub entries: Vec<TypeClassEntry<T>>,
}

impl<T: Real> TypeClassSpectrum<T> {
    /// `sum mult * eigenvalue`, which must be one.
    pub fn normalization(&self) -> T {
        self.entries.iter().map(|e| (e.ln_multiplicity + e.ln_eigenvalue).exp()).collect::<CompensatedSum<T>>().value()
    }

    pub fn entropy(&self) -> T {
        let neg_inf = T::lit(f64::NEG_INFINITY);
        self.entries
            .iter()
            .filter(|e| e.ln_eigenvalue != neg_inf)
            .map(|e| -((e.ln_multiplicity + e.ln_eigenvalue).exp() * e.ln_eigenvalue))
            .collect::<CompensatedSum<T>>()
            .value()
    }

    /// Every eigenvalue repeated by its multiplicity, ascending.
    pub fn expanded(&self) -> Vec<T> {
        let mut out = Vec::new();
        for e in &self.entries {
            let mult = e.multiplicity().to_usize().unwrap_or(0);
            out.extend(std::iter::repeat_n(e.eigenvalue(), mult));
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        out
    }
}

/// Type-class representation of the symmetrized state of `sigma_count` sigmas among `molecules` slots.
pub fn type_class_spectrum<T: Real>(
    sigma: &ClassicalDistribution<T>,
    rho: &ClassicalDistribution<T>,
    molecules: usize,
    sigma_count: usize,
    budget: usize,
) -> Result<SymmetrizedMixture<T>> {
    check_pair(sigma, rho)?;
    if sigma_count == 0 || sigma_count > molecules {
        return Err(Error::InvalidArgument(format!("sigma count {sigma_count} must lie in 1..={molecules}")));
    }
    check_budget(rho.dim(), molecules, budget)?;
    let eig = TypeEigenvalue::new(sigma, rho, molecules, sigma_count);
    let mut entries = Vec::new();
    for_each_type(rho.dim(), molecules, |m| {
        entries.push(TypeClassEntry {
            counts: m.to_vec(),
            ln_eigenvalue: eig.ln_eigenvalue(m),
            ln_multiplicity: eig.ln_multiplicity(m),
        });
    });
    let spectrum = TypeClassSpectrum { entries };
    let total = spectrum.normalization();
    if !((total - T::one()).abs() <= T::tol(NORMALIZATION_TOL)) {
        return Err(Error::IdentityViolation { lhs: total.as_f64(), rhs: 1.0 });
    }
    Ok(SymmetrizedMixture { d: rho.dim(), molecules, representation: Representation::TypeClasses(spectrum) })
}

/// Joint eigenvalues of a commuting pair, as `(sigma, rho)` distributions over a common eigenbasis.
///
/// Commutation is tested in rho's eigenbasis as `max |sigma'_{ab} (r_b - r_a)|`.
pub fn common_eigenbasis<T: Real>(
    sigma: &DensityOperator<T>,
    rho: &DensityOperator<T>,
) -> Result<(ClassicalDistribution<T>, ClassicalDistribution<T>)> {
    let d = rho.dim();
    if sigma.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: sigma.dim() });
    }
    if rho.is_diagonal() && sigma.is_diagonal() {
        let take = |s: &DensityOperator<T>| (0..d).map(|i| s.matrix()[(i, i)].re).collect::<Vec<_>>();
        return Ok((normalized(take(sigma))?, normalized(take(rho))?));
    }
    let v = rho.eigenvectors();
    let r = rho.eigenvalues();
    let s = v.adjoint() * sigma.matrix() * v;
    let mut residual = T::zero();
    for a in 0..d {
        for b in 0..d {
            residual = residual.max((s[(a, b)] * crate::scalar::c(r[b] - r[a])).modulus());
        }
    }
    if !(residual <= T::tol(COMMUTATION_TOL)) {
        return Err(Error::NonCommuting(residual.as_f64()));
    }
    // A generic combination separates any joint degeneracy left in rho's spectrum.
    let weight = T::lit(0.618_033_988_749_894_8);
    let combo = rho.matrix() + sigma.matrix() * crate::scalar::c(weight);
    let (_, w) = hermitian_eigen(&combo);
    let expect = |m: &crate::scalar::CMatrix<T>| -> Vec<T> {
        (0..d).map(|k| (w.column(k).adjoint() * m * w.column(k))[(0, 0)].re).collect()
    };
    Ok((normalized(expect(sigma.matrix()))?, normalized(expect(rho.matrix()))?))
}

fn normalized<T: Real>(p: Vec<T>) -> Result<ClassicalDistribution<T>> {
    let clipped: Vec<T> = p.into_iter().map(|x| x.max(T::zero())).collect();
    let total = clipped.iter().fold(T::zero(), |a, &b| a + b);
    ClassicalDistribution::new(clipped.into_iter().map(|x| x / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::UnitaryOperator;
    use crate::random::random_haar_unitary;
    use crate::state::apply_unitary;
    use crate::verify::{brute_force_placement_spectrum, plain_entropy};

    fn dist(p: &[f64]) -> ClassicalDistribution<f64> {
        ClassicalDistribution::new(p.to_vec()).unwrap()
    }

    #[test]
    fn type_enumeration_counts() {
        for (d, n) in [(1usize, 5usize), (2, 7), (3, 4), (4, 6)] {
            let mut count = 0;
            for_each_type(d, n, |m| {
                assert_eq!(m.iter().sum::<usize>(), n);
                count += 1;
            });
            assert_eq!(count as f64, type_class_count(d, n));
        }
    }

    #[test]
    fn identical_states_have_no_mixing_entropy() {
        let rho = dist(&[0.5, 0.3, 0.2]);
        for n in [1, 3, 17, 200] {
            let rec = classical_mixing_entropy_exact(&rho, &rho, n).unwrap();
            // ln N! carries ~1 ulp of absolute error, which S[R] - n S[rho] - S[sigma] exposes.
            assert!(rec.s_mix.abs() < 1e-9, "n={n}: {}", rec.s_mix);
            assert!(rec.s_rel.abs() < 1e-15);
        }
    }

    #[test]
    fn n1_example_matches_string_enumeration() {
        let rec = classical_mixing_entropy_exact(&dist(&[0.25, 0.75]), &dist(&[0.75, 0.25]), 1).unwrap();
        let spec = brute_force_placement_spectrum(&[0.25, 0.75], &[0.75, 0.25], 2, 1);
        let s_rho = plain_entropy(&[0.75, 0.25]);
        assert!((rec.s_mix - (plain_entropy(&spec) - 2.0 * s_rho)).abs() < 1e-14);
        assert!((rec.s_mix - 0.2301).abs() < 1e-4);
    }

    #[test]
    fn spectrum_matches_brute_force() {
        for (sigma, rho, molecules) in [
            (vec![0.3, 0.7], vec![0.7, 0.3], 12usize),
            (vec![0.1, 0.2, 0.7], vec![0.5, 0.3, 0.2], 8),
            (vec![1.0, 0.0, 0.0], vec![0.4, 0.4, 0.2], 7),
        ] {
            let mix = type_class_spectrum(&dist(&sigma), &dist(&rho), molecules, 1, DEFAULT_TYPE_BUDGET).unwrap();
            let ours = mix.expanded_spectrum().unwrap();
            let brute = brute_force_placement_spectrum(&sigma, &rho, molecules, 1);
            assert_eq!(ours.len(), brute.len());
            for (a, b) in ours.iter().zip(&brute) {
                assert!((a - b).abs() <= 1e-12 * b.max(1e-300), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn multi_reduces_to_single() {
        let sigma = dist(&[0.2, 0.5, 0.3]);
        let rho = dist(&[0.6, 0.1, 0.3]);
        for n in [1, 4, 30] {
            let a = classical_mixing_entropy_exact(&sigma, &rho, n).unwrap();
            let b = classical_mixing_entropy_multi(&sigma, &rho, n + 1, 1).unwrap();
            assert!((a.s_mix - b.s_mix).abs() < 1e-12);
        }
    }

    #[test]
    fn multi_matches_placement_enumeration() {
        let sigma = [0.15, 0.85];
        let rho = [0.6, 0.4];
        let brute = brute_force_placement_spectrum(&sigma, &rho, 6, 2);
        let s_r = plain_entropy(&brute);
        let expected = s_r - 4.0 * plain_entropy(&rho) - 2.0 * plain_entropy(&sigma);
        let rec = classical_mixing_entropy_multi(&dist(&sigma), &dist(&rho), 6, 2).unwrap();
        assert!((rec.s_mix - expected).abs() < 1e-12);
        assert_eq!((rec.n, rec.sigma_count), (4, 2));
        let same = classical_mixing_entropy_multi(&dist(&rho), &dist(&rho), 6, 3).unwrap();
        assert!(same.s_mix.abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let rho = dist(&[1.0, 0.0]);
        let sigma = dist(&[0.5, 0.5]);
        assert!(matches!(classical_mixing_entropy_exact(&sigma, &rho, 3), Err(Error::SingularReference(_))));
        let rho = dist(&[0.25; 4]);
        let sigma = dist(&[0.1, 0.2, 0.3, 0.4]);
        assert!(matches!(
            classical_mixing_entropy_exact_with_budget(&sigma, &rho, 100, 1000),
            Err(Error::TypeBudgetExceeded { .. })
        ));
        assert!(classical_mixing_entropy_multi(&sigma, &rho, 3, 4).is_err());
        assert!(classical_mixing_entropy_multi(&sigma, &rho, 3, 0).is_err());
    }

    #[test]
    fn common_eigenbasis_of_rotated_commuting_pair() {
        let u = random_haar_unitary::<f64>(12, 3).unwrap();
        let rho = apply_unitary(&DensityOperator::diagonal(&dist(&[0.5, 0.3, 0.2])), &u).unwrap();
        let sigma = apply_unitary(&DensityOperator::diagonal(&dist(&[0.1, 0.6, 0.3])), &u).unwrap();
        let (s, r) = common_eigenbasis(&sigma, &rho).unwrap();
        let mut pairs: Vec<(f64, f64)> =
            r.probabilities().iter().copied().zip(s.probabilities().iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let expected = [(0.2, 0.3), (0.3, 0.6), (0.5, 0.1)];
        for (got, want) in pairs.iter().zip(expected) {
            assert!((got.0 - want.0).abs() < 1e-12 && (got.1 - want.1).abs() < 1e-12);
        }
        let other = apply_unitary(
            &sigma,
            &UnitaryOperator::new(random_haar_unitary::<f64>(2, 3).unwrap().into_matrix()).unwrap(),
        )
        .unwrap();
        assert!(matches!(common_eigenbasis(&other, &rho), Err(Error::NonCommuting(_))));
    }

    /// Gap through the identity `S[sigma|rho] - S_mix = E_R[ln w(m)]`, with
    /// `w(m) = (1/N) sum_a m_a sigma_a/rho_a`; binary alphabet, weights from
    /// a direct binomial recursion.
    fn gap_oracle_binary(sigma: [f64; 2], rho: [f64; 2], n: usize) -> f64 {
        let big_n = n + 1;
        let mut ln_binom = 0.0f64;
        let mut acc = 0.0;
        for k in 0..=big_n {
            if k > 0 {
                ln_binom += ((big_n - k + 1) as f64).ln() - (k as f64).ln();
            }
            let (m0, m1) = (k as f64, (big_n - k) as f64);
            let w = (m0 * sigma[0] / rho[0] + m1 * sigma[1] / rho[1]) / big_n as f64;
            let q_ln = m0 * rho[0].ln() + m1 * rho[1].ln() + w.ln();
            acc += (ln_binom + q_ln).exp() * w.ln();
        }
        acc
    }

    #[test]
    fn large_n_agrees_with_gap_identity() {
        for n in [1usize, 10, 300, 4096] {
            let rec = classical_mixing_entropy_exact(&dist(&[0.3, 0.7]), &dist(&[0.7, 0.3]), n).unwrap();
            let oracle = gap_oracle_binary([0.3, 0.7], [0.7, 0.3], n);
            assert!((rec.gap - oracle).abs() < 1e-8, "n={n}: {} vs {oracle}", rec.gap);
        }
    }
}
