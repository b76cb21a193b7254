//! Convergence of the entropy of mixing with the reservoir size.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{mixing_entropy, MixingMethod, MixingRecord, DEFAULT_DENSE_CAP};
use crate::error::{Error, Result};
use crate::operators::DensityOperator;
use crate::scalar::Real;

/// Decay law fitted to the tail of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitModel {
    #[serde(rename = "1/n")]
    InverseN,
    #[serde(rename = "ln(n)/n")]
    LogNOverN,
}

impl FitModel {
    pub fn as_str(self) -> &'static str {
        match self {
            FitModel::InverseN => "1/n",
            FitModel::LogNOverN => "ln(n)/n",
        }
    }

    pub fn eval(self, n: f64) -> f64 {
        match self {
            FitModel::InverseN => 1.0 / n,
            FitModel::LogNOverN => n.ln() / n,
        }
    }
}

/// Fit `S_mix(n) = limit - a f(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub model: FitModel,
    pub a: f64,
    pub limit: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub dense_cap: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { dense_cap: DEFAULT_DENSE_CAP }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SweepPoint<T> {
    pub record: MixingRecord<T>,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug)]
pub struct SweepResult<T> {
    /// Ordered by `n` ascending.
    pub points: Vec<SweepPoint<T>>,
    pub extrapolation: Extrapolation,
}

impl<T: Real> SweepResult<T> {
    pub fn records(&self) -> impl Iterator<Item = &MixingRecord<T>> {
        self.points.iter().map(|p| &p.record)
    }
}

fn least_squares(points: &[(f64, f64)], model: FitModel) -> Extrapolation {
    // y = limit - a x, with x = f(n).
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(n, _)| model.eval(n)).collect();
    let mean_x = xs.iter().sum::<f64>() / k;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(points).map(|(x, p)| (x - mean_x) * (p.1 - mean_y)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let limit = mean_y - slope * mean_x;
    let sse: f64 = xs.iter().zip(points).map(|(x, p)| (p.1 - (limit + slope * x)).powi(2)).sum();
    Extrapolation { model, a: -slope, limit, residual: (sse / k).sqrt() }
}

/// Fits both decay laws to the largest half of the sweep (at least three
/// points) and keeps the one with the smaller residual.
pub fn extrapolate(samples: &[(usize, f64)]) -> Result<Extrapolation> {
    let mut pts: Vec<(usize, f64)> = samples.to_vec();
    pts.sort_by_key(|p| p.0);
    pts.dedup_by_key(|p| p.0);
    if pts.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: pts.len() });
    }
    let take = pts.len().div_ceil(2).max(3);
    let tail: Vec<(f64, f64)> = pts[pts.len() - take..].iter().map(|&(n, y)| (n as f64, y)).collect();
    let a = least_squares(&tail, FitModel::InverseN);
    let b = least_squares(&tail, FitModel::LogNOverN);
    Ok(if b.residual < a.residual { b } else { a })
}

/// One mixing record per `n`, computed in parallel, plus the tail extrapolation.
pub fn convergence_sweep<T: Real>(
    sigma: &DensityOperator<T>,
    rho: &DensityOperator<T>,
    n_list: &[usize],
    method: MixingMethod,
    options: SweepOptions,
) -> Result<SweepResult<T>> {
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: ns.len() });
    }
    let points: Vec<SweepPoint<T>> = ns
        .par_iter()
        .map(|&n| {
            let start = Instant::now();
            let record = mixing_entropy(sigma, rho, n, method, options.dense_cap)?;
            Ok(SweepPoint { record, wall_time_ms: start.elapsed().as_secs_f64() * 1e3 })
        })
        .collect::<Result<_>>()?;
    let samples: Vec<(usize, f64)> = points.iter().map(|p| (p.record.n, p.record.s_mix.as_f64())).collect();
    let extrapolation = extrapolate(&samples)?;
    Ok(SweepResult { points, extrapolation })
}

/// `1, 2, 4, ..., 2^k` up to `max`.
pub fn log2_grid(max: usize) -> Vec<usize> {
    std::iter::successors(Some(1usize), |&n| n.checked_mul(2)).take_while(|&n| n <= max).collect()
}
