//! The permutation-symmetrizing map and the entropy of mixing.
//!
//! Indexing convention: `molecules` (`N`) is always the total number of
//! subsystems; public entry points that follow the "one sigma among n copies of
//! rho" convention take `n = N - 1` and convert at the boundary.

mod classical;
mod dense;
mod graceful;
mod sweep;

use serde::{Deserialize, Serialize};

pub use classical::{
    classical_mixing_entropy_exact, classical_mixing_entropy_exact_with_budget, classical_mixing_entropy_multi,
    classical_mixing_entropy_multi_with_budget, common_eigenbasis, type_class_count, type_class_spectrum,
    TypeClassEntry, TypeClassSpectrum, DEFAULT_TYPE_BUDGET, NORMALIZATION_TOL,
};
pub use dense::{
    adjacent_transposition, mixing_entropy_dense, permutation_twirl_dense, symmetrized_state_dense, DenseMixture,
    DEFAULT_DENSE_CAP,
};
pub use graceful::{graceful_checks, product_state, GracefulReport};
pub use sweep::{
    convergence_sweep, extrapolate, log2_grid, Extrapolation, FitModel, SweepOptions, SweepPoint, SweepResult,
};

use crate::entropy::relative_entropy;
use crate::error::{Error, Result};
use crate::operators::DensityOperator;
use crate::scalar::Real;

/// Residual `[sigma, rho]` (max-norm, in rho's eigenbasis) below which the pair counts as commuting.
pub const COMMUTATION_TOL: f64 = 1e-10;

/// How the entropy of the symmetrized state is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixingMethod {
    /// Full diagonalization of the `d^N` matrix.
    Dense,
    /// Type-class enumeration; requires commuting states.
    ClassicalExact,
    /// Classical when the states commute, dense otherwise.
    Auto,
}

impl MixingMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            MixingMethod::Dense => "dense",
            MixingMethod::ClassicalExact => "classical-exact",
            MixingMethod::Auto => "auto",
        }
    }
}

impl std::str::FromStr for MixingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(MixingMethod::Dense),
            "classical-exact" | "classical" => Ok(MixingMethod::ClassicalExact),
            "auto" => Ok(MixingMethod::Auto),
            other => Err(Error::InvalidArgument(format!("unknown mixing method {other:?}"))),
        }
    }
}

/// One sample of the entropy of mixing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingRecord<T> {
    /// Number of rho-molecules.
    pub n: usize,
    /// Number of sigma-molecules (1 except for the multi-collision variant).
    pub sigma_count: usize,
    pub s_mix: T,
    /// Reference value: `sigma_count * S[sigma|rho]`.
    pub s_rel: T,
    /// `s_rel - s_mix`, signed.
    pub gap: T,
    /// The method actually used (never `Auto`).
    pub method: MixingMethod,
}

impl<T: Real> MixingRecord<T> {
    pub(crate) fn new(n: usize, sigma_count: usize, s_mix: T, s_rel: T, method: MixingMethod) -> Self {
        Self { n, sigma_count, s_mix, s_rel, gap: s_rel - s_mix, method }
    }

    /// Total number of subsystems `N`.
    pub fn molecules(&self) -> usize {
        self.n + self.sigma_count
    }

    /// Upper bound on the entropy of mixing: the log of the number of mixed placements.
    pub fn upper_bound(&self) -> T {
        crate::mixing::classical::ln_binomial::<T>(self.molecules(), self.sigma_count)
    }

    /// `-tol <= s_mix <= upper_bound + tol`.
    pub fn within_bounds(&self, tol: T) -> bool {
        self.s_mix >= -tol && self.s_mix <= self.upper_bound() + tol
    }
}

/// The symmetrized state of one sigma among `N - 1` copies of rho.
#[derive(Clone, Debug)]
pub struct SymmetrizedMixture<T: Real> {
    pub d: usize,
    pub molecules: usize,
    pub representation: Representation<T>,
}

#[derive(Clone, Debug)]
pub enum Representation<T: Real> {
    Dense(DenseMixture<T>),
    TypeClasses(TypeClassSpectrum<T>),
}

impl<T: Real> SymmetrizedMixture<T> {
    /// Eigenvalues with multiplicities, expanded; only sensible for small `d^N`.
    pub fn expanded_spectrum(&self) -> Result<Vec<T>> {
        match &self.representation {
            Representation::Dense(m) => m.eigenvalues(),
            Representation::TypeClasses(s) => Ok(s.expanded()),
        }
    }

    pub fn entropy(&self) -> Result<T> {
        match &self.representation {
            Representation::Dense(m) => crate::entropy::spectrum_entropy(m.eigenvalues()?),
            Representation::TypeClasses(s) => Ok(s.entropy()),
        }
    }
}

/// Checks `rho` has full rank; required by every mixing-entropy method.
pub(crate) fn require_full_rank<T: Real>(rho: &DensityOperator<T>) -> Result<()> {
    let min = rho.eigenvalues()[0];
    if !(min > T::zero()) {
        return Err(Error::SingularReference(min.as_f64()));
    }
    Ok(())
}

/// Entropy of mixing `S[R] - n S[rho] - S[sigma]` for `R` the symmetrization of
/// `sigma ⊗ rho^{⊗n}`.
pub fn mixing_entropy<T: Real>(
    sigma: &DensityOperator<T>,
    rho: &DensityOperator<T>,
    n: usize,
    method: MixingMethod,
    dense_cap: usize,
) -> Result<MixingRecord<T>> {
    if sigma.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    require_full_rank(rho)?;
    let resolved = match method {
        MixingMethod::Auto => match common_eigenbasis(sigma, rho) {
            Ok(_) => MixingMethod::ClassicalExact,
            Err(Error::NonCommuting(_)) => MixingMethod::Dense,
            Err(e) => return Err(e),
        },
        m => m,
    };
    match resolved {
        MixingMethod::ClassicalExact => {
            let (s, r) = common_eigenbasis(sigma, rho)?;
            let mut rec = classical_mixing_entropy_exact(&s, &r, n)?;
            rec.s_rel = relative_entropy(sigma, rho)?;
            rec.gap = rec.s_rel - rec.s_mix;
            Ok(rec)
        }
        _ => mixing_entropy_dense(sigma, rho, n, dense_cap),
    }
}
