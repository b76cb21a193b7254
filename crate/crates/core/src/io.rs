//! File formats: matrix and distribution JSON, sweep CSV, plot data.
//!
//! Floats are written by `serde_json` / `{:e}` formatting, which emit the
//! shortest decimal that parses back to the identical bit pattern.

use std::fmt::Write as _;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixing::{SweepPoint, SweepResult};
use crate::operators::{ClassicalDistribution, DensityOperator, HermitianOperator, UnitaryOperator};
use crate::scalar::{CMatrix, Real};

/// `{"dim": d, "re": [[..]], "im": [[..]]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn from_matrix<T: Real>(m: &CMatrix<T>) -> Self {
        let n = m.nrows();
        let re = (0..n).map(|i| (0..n).map(|j| m[(i, j)].re.as_f64()).collect()).collect();
        let im = (0..n).map(|i| (0..n).map(|j| m[(i, j)].im.as_f64()).collect()).collect();
        Self { dim: n, re, im: Some(im) }
    }

    /// A missing `im` block means a real matrix.
    pub fn to_matrix<T: Real>(&self) -> Result<CMatrix<T>> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let zeros = vec![vec![0.0; n]; n];
        let im = self.im.as_ref().unwrap_or(&zeros);
        if self.re.len() != n || im.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.re.len().max(im.len()) });
        }
        for row in self.re.iter().chain(im) {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
        }
        Ok(CMatrix::from_fn(n, n, |i, j| Complex::new(T::lit(self.re[i][j]), T::lit(im[i][j]))))
    }

    pub fn to_hermitian<T: Real>(&self) -> Result<HermitianOperator<T>> {
        HermitianOperator::new(self.to_matrix()?)
    }

    pub fn to_density<T: Real>(&self) -> Result<DensityOperator<T>> {
        DensityOperator::new(self.to_matrix()?)
    }

    pub fn to_unitary<T: Real>(&self) -> Result<UnitaryOperator<T>> {
        UnitaryOperator::new(self.to_matrix()?)
    }
}

/// `{"p": [..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionJson {
    pub p: Vec<f64>,
}

impl DistributionJson {
    pub fn from_distribution<T: Real>(p: &ClassicalDistribution<T>) -> Self {
        Self { p: p.probabilities().iter().map(|x| x.as_f64()).collect() }
    }

    pub fn to_distribution<T: Real>(&self) -> Result<ClassicalDistribution<T>> {
        ClassicalDistribution::new(self.p.iter().map(|&x| T::lit(x)).collect())
    }
}

/// A state given either as a full matrix or as a classical distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateJson {
    Distribution(DistributionJson),
    Matrix(MatrixJson),
}

impl StateJson {
    pub fn to_density<T: Real>(&self) -> Result<DensityOperator<T>> {
        match self {
            StateJson::Distribution(p) => Ok(DensityOperator::diagonal(&p.to_distribution()?)),
            StateJson::Matrix(m) => m.to_density(),
        }
    }
}

/// Entropy display unit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    /// Factor converting a value in nats to this unit.
    pub fn scale(self) -> f64 {
        match self {
            Units::Nats => 1.0,
            Units::Bits => 1.0 / std::f64::consts::LN_2,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

/// `n,method,S_mix_<u>,S_rel_<u>,gap_<u>,wall_time_ms`.
pub fn sweep_csv<T: Real>(points: &[SweepPoint<T>], units: Units, with_timings: bool) -> String {
    let u = units.suffix();
    let mut out = format!("n,method,S_mix_{u},S_rel_{u},gap_{u},wall_time_ms\n");
    let k = units.scale();
    for p in points {
        let r = &p.record;
        let wall = if with_timings { p.wall_time_ms } else { 0.0 };
        let _ = writeln!(
            out,
            "{},{},{:e},{:e},{:e},{:.3}",
            r.n,
            r.method.as_str(),
            r.s_mix.as_f64() * k,
            r.s_rel.as_f64() * k,
            r.gap.as_f64() * k,
            wall
        );
    }
    out
}

/// Two-column `(n, gap)` plot data.
pub fn gap_plot_csv<T: Real>(sweep: &SweepResult<T>, units: Units) -> String {
    let mut out = format!("n,gap_{}\n", units.suffix());
    for r in sweep.records() {
        let _ = writeln!(out, "{},{:e}", r.n, r.gap.as_f64() * units.scale());
    }
    out
}

/// Self-contained SVG line chart of `|gap|` against `n`, both axes logarithmic.
pub fn gap_plot_svg<T: Real>(sweep: &SweepResult<T>) -> String {
    let pts: Vec<(f64, f64)> = sweep
        .records()
        .filter(|r| r.n > 0 && r.gap.as_f64().abs() > 0.0)
        .map(|r| ((r.n as f64).log10(), r.gap.as_f64().abs().log10()))
        .collect();
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">log10 |gap| vs log10 n</text>\n",
        w / 2.0
    );
    if pts.len() >= 2 {
        let (x0, x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
        let (y0, y1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
        let sx = |x: f64| pad + (x - x0) / (x1 - x0).max(1e-12) * (w - 2.0 * pad);
        let sy = |y: f64| h - pad - (y - y0) / (y1 - y0).max(1e-12) * (h - 2.0 * pad);
        let _ = writeln!(
            svg,
            "<line x1=\"{pad}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n<line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{}\" stroke=\"black\"/>",
            h - pad,
            w - pad,
            h - pad,
            h - pad
        );
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"{}\"/>",
            path.join(" ")
        );
        for &(x, y) in &pts {
            let _ = writeln!(svg, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"/>", sx(x), sy(y));
        }
        let _ = writeln!(
            svg,
            "<text x=\"{pad}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">n: 10^{x0:.2} .. 10^{x1:.2}, |gap|: 10^{y0:.2} .. 10^{y1:.2}</text>",
            h - 15.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
