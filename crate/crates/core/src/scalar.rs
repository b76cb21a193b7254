//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All operator algebra is written against [`Real`], a thin extension of
//! nalgebra's `RealField` with the handful of extras the entropy code needs
//! (log-gamma and precision-aware tolerances). `f64` is the working type; `f32`
//! is supported with proportionally looser tolerances.

use nalgebra::{Complex, DMatrix, DVector, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating point scalar usable throughout the crate.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {
    /// Multiplier applied to the double-precision tolerances.
    const TOLERANCE_SCALE: f64;

    /// Natural logarithm of the gamma function for positive arguments.
    fn log_gamma(self) -> Self;

    /// Converts an `f64` literal, panicking only if the type cannot represent it at all.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// A double-precision tolerance rescaled for this type.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x * Self::TOLERANCE_SCALE)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(|| Self::lit(n as f64))
    }
}

impl Real for f64 {
    const TOLERANCE_SCALE: f64 = 1.0;

    fn log_gamma(self) -> Self {
        libm::lgamma(self)
    }
}

impl Real for f32 {
    const TOLERANCE_SCALE: f64 = 1e6;

    fn log_gamma(self) -> Self {
        libm::lgammaf(self)
    }
}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;
/// Dense complex matrix over `T`.
pub type CMatrix<T> = DMatrix<Complex<T>>;
/// Dense real vector over `T`.
pub type RVector<T> = DVector<T>;

#[inline]
pub(crate) fn c<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self { sum: T::zero(), carry: T::zero() }
    }
}

impl<T: Real> CompensatedSum<T> {
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

impl<T: Real> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// `ln(e^a + e^b)` without overflow; either argument may be `-inf`.
pub(crate) fn log_add_exp<T: Real>(a: T, b: T) -> T {
    let neg_inf = T::lit(f64::NEG_INFINITY);
    if a == neg_inf {
        return b;
    }
    if b == neg_inf {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::<f64>::default();
        acc.add(1e16);
        for _ in 0..10 {
            acc.add(1.0);
        }
        acc.add(-1e16);
        assert_eq!(acc.value(), 10.0);
    }

    #[test]
    fn log_gamma_matches_factorials() {
        let mut fact = 1.0f64;
        for k in 1..20u32 {
            fact *= k as f64;
            let lg = f64::from(k + 1).log_gamma();
            assert!((lg - fact.ln()).abs() <= 1e-13 * fact.ln().max(1.0));
        }
        assert!((5.0f32.log_gamma() - 24f32.ln()).abs() < 1e-5);
    }

    #[test]
    fn log_add_exp_handles_infinities() {
        let ninf = f64::NEG_INFINITY;
        assert_eq!(log_add_exp(ninf, 1.5), 1.5);
        assert_eq!(log_add_exp(2.0, ninf), 2.0);
        let v = log_add_exp(1000.0, 1000.0);
        assert!((v - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
