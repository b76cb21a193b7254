//! Counting arguments behind the classical mixing estimate: typical-string
//! multinomials, the insertion factor, and the averaged entropy increase.

use serde::Serialize;

use crate::entropy::shannon_entropy;
use crate::error::{Error, Result};
use crate::operators::ClassicalDistribution;
use crate::scalar::{CompensatedSum, Real};

/// Symbol counts `m_1..m_d` of a string of length `N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeVector {
    counts: Vec<usize>,
    total: usize,
}

impl TypeVector {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        let total = counts.iter().try_fold(0usize, |acc, &m| acc.checked_add(m));
        let total = total.ok_or_else(|| Error::InvalidArgument("type vector total overflows".into()))?;
        Ok(Self { counts, total })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    /// Largest-remainder rounding of `n p_a` to integers summing to `n`.
    ///
    /// Ties in the fractional part go to the lower symbol index.
    pub fn round_typical<T: Real>(p: &ClassicalDistribution<T>, n: usize) -> Self {
        let nf = n as f64;
        let targets: Vec<f64> = p.probabilities().iter().map(|x| x.as_f64() * nf).collect();
        let mut counts: Vec<usize> = targets.iter().map(|t| t.floor().max(0.0) as usize).collect();
        let assigned: usize = counts.iter().sum();
        let mut order: Vec<usize> = (0..counts.len()).collect();
        order.sort_by(|&a, &b| {
            let fa = targets[a] - targets[a].floor();
            let fb = targets[b] - targets[b].floor();
            fb.partial_cmp(&fa).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
        });
        if assigned <= n {
            for &a in order.iter().cycle().take(n - assigned) {
                counts[a] += 1;
            }
        } else {
            // Only reachable through rounding of a sum slightly above one.
            let mut excess = assigned - n;
            for &a in order.iter().rev().cycle() {
                if excess == 0 {
                    break;
                }
                if counts[a] > 0 {
                    counts[a] -= 1;
                    excess -= 1;
                }
            }
        }
        Self { counts, total: n }
    }
}

/// `ln(N! / prod_a m_a!)`.
pub fn log_multinomial<T: Real>(m: &TypeVector) -> T {
    let mut acc = CompensatedSum::default();
    acc.add(T::from_usize_lossy(m.total + 1).log_gamma());
    for &k in &m.counts {
        acc.add(-T::from_usize_lossy(k + 1).log_gamma());
    }
    acc.value()
}

/// Per-symbol log-count of typical strings against the Shannon entropy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TypicalityCheck {
    pub n: usize,
    pub lhs_per_symbol: f64,
    #[serde(rename = "S_rho")]
    pub s_rho: f64,
    pub deficit: f64,
}

pub fn typicality_entropy_check<T: Real>(rho: &ClassicalDistribution<T>, n: usize) -> Result<TypicalityCheck> {
    if n == 0 {
        return Err(Error::InvalidArgument("typicality check needs n >= 1".into()));
    }
    let m = TypeVector::round_typical(rho, n);
    let lhs = log_multinomial::<T>(&m) / T::from_usize_lossy(n);
    let s = shannon_entropy(rho);
    Ok(TypicalityCheck { n, lhs_per_symbol: lhs.as_f64(), s_rho: s.as_f64(), deficit: (s - lhs).as_f64() })
}

/// Growth of the number of typical orderings when one symbol `a` is inserted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InsertionFactor {
    pub n: usize,
    pub rho_a: f64,
    pub exact: f64,
    pub limit: f64,
    pub rel_err: f64,
}

/// `(n + 1)/(round(n rho_a) + 1)` against its limit `1/rho_a`.
pub fn insertion_factor<T: Real>(n: usize, rho_a: T) -> Result<InsertionFactor> {
    if rho_a == T::zero() {
        return Err(Error::DivergentInsertionFactor);
    }
    if !(rho_a > T::zero() && rho_a <= T::one()) {
        return Err(Error::InvalidArgument(format!("probability {rho_a} outside (0, 1]")));
    }
    let count = (T::from_usize_lossy(n) * rho_a).round();
    let exact = T::from_usize_lossy(n + 1) / (count + T::one());
    let limit = T::one() / rho_a;
    Ok(InsertionFactor {
        n,
        rho_a: rho_a.as_f64(),
        exact: exact.as_f64(),
        limit: limit.as_f64(),
        rel_err: ((exact - limit).abs() * rho_a).as_f64(),
    })
}

/// Average entropy increase `-sum_a sigma_a ln rho_a - S[sigma]`.
pub fn classical_mixing_increase_formula<T: Real>(
    sigma: &ClassicalDistribution<T>,
    rho: &ClassicalDistribution<T>,
) -> Result<T> {
    if sigma.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let mut cross = CompensatedSum::default();
    for (&s, &r) in sigma.probabilities().iter().zip(rho.probabilities()) {
        if s > T::zero() {
            if r <= T::zero() {
                return Err(Error::InfiniteRelativeEntropy);
            }
            cross.add(-(s * r.ln()));
        }
    }
    Ok(cross.value() - shannon_entropy(sigma))
}
