//! Sequential unitary collisions of reservoir molecules with an external field.
//!
//! The reservoir is a product state of `n` distinguishable molecules. After `k`
//! collisions it is `sigma^{⊗k} ⊗ rho^{⊗(n-k)}`, so it is tracked as the pair of
//! counts rather than as a `d^n` matrix.

use std::fmt::Write as _;

use crate::entropy::{energy_mean, relative_entropy, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::operators::{
    commutator_norm, kron, DensityOperator, HermitianOperator, InverseTemperature, UnitaryOperator,
};
use crate::scalar::{CMatrix, Real};
use crate::state::{apply_unitary, gibbs_state};

/// Elementwise tolerance used to recognise `rho` as the Gibbs state of `(H, beta)`.
pub const GIBBS_CHECK_TOL: f64 = 1e-8;
/// Relative tolerance of the `beta * dE = S[sigma|rho]` identity.
pub const DISSIPATION_IDENTITY_TOL: f64 = 1e-9;
/// Absolute floor for the identity check when both sides vanish.
const IDENTITY_ABS_FLOOR: f64 = 1e-13;

pub const CSV_HEADER: &str = "collision_index,delta_E,cum_delta_E,dirr_S,cum_dirr_S,reservoir_S_info";

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Mean energy transferred by one collision: `tr(U rho U^dagger H) - tr(rho H)`.
pub fn collision_energy_transfer<T: Real>(
    rho: &DensityOperator<T>,
    u: &UnitaryOperator<T>,
    h: &HermitianOperator<T>,
) -> Result<T> {
    check_dims(rho.dim(), u.dim())?;
    check_dims(rho.dim(), h.dim())?;
    let sigma = apply_unitary(rho, u)?;
    Ok(energy_mean(&sigma, h)? - energy_mean(rho, h)?)
}

pub(crate) fn identity_holds<T: Real>(lhs: T, rhs: T, rel_tol: T) -> bool {
    let scale = lhs.abs().max(rhs.abs());
    (lhs - rhs).abs() <= rel_tol * scale + T::tol(IDENTITY_ABS_FLOOR)
}

/// Thermodynamic entropy production `beta * dE` of one collision.
///
/// Requires `rho` to be the Gibbs state of `(H, beta)` with `beta > 0`; the
/// result is cross-checked against `S[U rho U^dagger | rho]`.
pub fn thermo_entropy_production<T: Real>(
    rho: &DensityOperator<T>,
    u: &UnitaryOperator<T>,
    h: &HermitianOperator<T>,
    beta: InverseTemperature<T>,
) -> Result<T> {
    if !beta.is_positive() {
        return Err(Error::NonPositiveBeta(beta.value().as_f64()));
    }
    check_dims(rho.dim(), h.dim())?;
    let gibbs = gibbs_state(h, beta)?;
    let dev = rho.max_distance(&gibbs);
    if !(dev <= T::tol(GIBBS_CHECK_TOL)) {
        return Err(Error::NotGibbs(dev.as_f64()));
    }
    let production = beta.value() * collision_energy_transfer(rho, u, h)?;
    let sigma = apply_unitary(rho, u)?;
    let s_rel = relative_entropy(&sigma, rho)?;
    if !identity_holds(production, s_rel, T::tol(DISSIPATION_IDENTITY_TOL)) {
        return Err(Error::IdentityViolation { lhs: production.as_f64(), rhs: s_rel.as_f64() });
    }
    Ok(production)
}

/// Parameters of a collision run.
#[derive(Clone, Debug)]
pub struct CollisionSpec<T: Real> {
    pub hamiltonian: HermitianOperator<T>,
    pub beta: InverseTemperature<T>,
    pub unitary: UnitaryOperator<T>,
    pub collisions: usize,
    pub reservoir_size: usize,
}

impl<T: Real> CollisionSpec<T> {
    pub fn new(
        hamiltonian: HermitianOperator<T>,
        beta: InverseTemperature<T>,
        unitary: UnitaryOperator<T>,
        collisions: usize,
        reservoir_size: usize,
    ) -> Result<Self> {
        let spec = Self { hamiltonian, beta, unitary, collisions, reservoir_size };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_dims(self.hamiltonian.dim(), self.unitary.dim())?;
        if self.reservoir_size == 0 {
            return Err(Error::InvalidArgument("reservoir size must be positive".into()));
        }
        if self.collisions > self.reservoir_size {
            return Err(Error::CollisionsExceedReservoir {
                collisions: self.collisions,
                reservoir: self.reservoir_size,
            });
        }
        Ok(())
    }
}

/// Product state of the reservoir as molecule counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReservoirState {
    pub collided: usize,
    pub equilibrium: usize,
}

impl ReservoirState {
    /// Informatic entropy `k S[sigma] + (n-k) S[rho]`.
    ///
    /// Molecules whose single-body entropies are bitwise equal are pooled before
    /// multiplying, so a unitary collision (which shares the spectrum) leaves
    /// the value unchanged to the last bit.
    pub fn entropy<T: Real>(&self, s_sigma: T, s_rho: T) -> T {
        if s_sigma == s_rho {
            T::from_usize_lossy(self.collided + self.equilibrium) * s_rho
        } else {
            T::from_usize_lossy(self.collided) * s_sigma + T::from_usize_lossy(self.equilibrium) * s_rho
        }
    }
}

/// One line of the collision ledger.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollisionRow<T> {
    pub index: usize,
    pub delta_e: T,
    pub cum_delta_e: T,
    pub dirr_s: T,
    pub cum_dirr_s: T,
    pub reservoir_entropy: T,
}

/// Per-collision bookkeeping for a reservoir run.
#[derive(Clone, Debug)]
pub struct CollisionLedger<T: Real> {
    pub rows: Vec<CollisionRow<T>>,
    /// Reservoir informatic entropy before any collision, `n S[rho]`.
    pub initial_entropy: T,
    /// `S[sigma|rho]` for the single-collision pair.
    pub relative_entropy: T,
    /// `|beta dE - S[sigma|rho]|`.
    pub identity_residual: T,
    /// Frobenius norm of `[U, H]`; zero means the collision conserves energy.
    pub commutator_norm: T,
    pub beta: T,
    pub final_state: ReservoirState,
}

impl<T: Real> CollisionLedger<T> {
    /// Only meaningful for `beta > 0`; otherwise the production column is merely `beta dE`.
    pub fn beta_is_positive(&self) -> bool {
        self.beta > T::zero()
    }

    /// CSV with one row per collision. `scale` converts entropy columns (1 for nats).
    pub fn to_csv(&self, entropy_scale: T) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:e},{:e},{:e},{:e},{:e}",
                r.index,
                r.delta_e.as_f64(),
                r.cum_delta_e.as_f64(),
                (r.dirr_s * entropy_scale).as_f64(),
                (r.cum_dirr_s * entropy_scale).as_f64(),
                (r.reservoir_entropy * entropy_scale).as_f64(),
            );
        }
        out
    }
}

/// Runs `k` successive collisions over distinct molecules of an `n`-molecule reservoir.
pub fn run_collision_sequence<T: Real>(spec: &CollisionSpec<T>) -> Result<CollisionLedger<T>> {
    spec.validate()?;
    let rho = gibbs_state(&spec.hamiltonian, spec.beta)?;
    let sigma = apply_unitary(&rho, &spec.unitary)?;
    let s_rho = von_neumann_entropy(&rho)?;
    let s_sigma = von_neumann_entropy(&sigma)?;
    let delta_e = collision_energy_transfer(&rho, &spec.unitary, &spec.hamiltonian)?;
    let beta = spec.beta.value();
    let dirr = beta * delta_e;
    let s_rel = relative_entropy(&sigma, &rho)?;

    let n = spec.reservoir_size;
    let initial = ReservoirState { collided: 0, equilibrium: n };
    let mut state = initial;
    let mut rows = Vec::with_capacity(spec.collisions);
    for i in 1..=spec.collisions {
        state = ReservoirState { collided: i, equilibrium: n - i };
        let count = T::from_usize_lossy(i);
        rows.push(CollisionRow {
            index: i,
            delta_e,
            cum_delta_e: count * delta_e,
            dirr_s: dirr,
            cum_dirr_s: count * dirr,
            reservoir_entropy: state.entropy(s_sigma, s_rho),
        });
    }
    Ok(CollisionLedger {
        rows,
        initial_entropy: initial.entropy(s_sigma, s_rho),
        relative_entropy: s_rel,
        identity_residual: (dirr - s_rel).abs(),
        commutator_norm: commutator_norm(spec.unitary.matrix(), spec.hamiltonian.matrix()),
        beta,
        final_state: state,
    })
}

/// `H_R = sum_k I^{⊗(k-1)} ⊗ H ⊗ I^{⊗(N-k)}` on `N` molecules.
pub fn reservoir_hamiltonian<T: Real>(
    h: &HermitianOperator<T>,
    molecules: usize,
    cap: usize,
) -> Result<HermitianOperator<T>> {
    if molecules == 0 {
        return Err(Error::InvalidArgument("reservoir must contain at least one molecule".into()));
    }
    let d = h.dim();
    let dim = checked_power(d, molecules)
        .filter(|&x| x <= cap)
        .ok_or(Error::DenseCapExceeded { dim: checked_power(d, molecules).unwrap_or(usize::MAX), cap })?;
    let id_d = CMatrix::<T>::identity(d, d);
    let mut total = h.matrix().clone();
    let mut width = d;
    for _ in 1..molecules {
        total = kron(&total, &id_d) + kron(&CMatrix::<T>::identity(width, width), h.matrix());
        width *= d;
    }
    debug_assert_eq!(total.nrows(), dim);
    Ok(HermitianOperator::from_trusted(total))
}

pub(crate) fn checked_power(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}
