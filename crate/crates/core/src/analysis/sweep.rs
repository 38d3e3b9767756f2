//! Resolution sweeps over FWHM, illumination or bin count, with log-log
//! power-law fits.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::rng::RngState;
use crate::models::ModelKind;
use crate::psf::PsfModel;
use crate::resolution::{resolve, McOptions, Method, ResolutionQuery, ResolutionResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    Fwhm,
    T,
    N,
}

impl SweepVar {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVar::Fwhm => "fwhm",
            SweepVar::T => "t",
            SweepVar::N => "n",
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fwhm" => Ok(SweepVar::Fwhm),
            "t" => Ok(SweepVar::T),
            "n" => Ok(SweepVar::N),
            other => Err(Error::param(format!("unknown sweep variable '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub var: SweepVar,
    pub grid: Vec<f64>,
    /// Kernel family; its FWHM is replaced by `fwhm` or the grid value.
    pub psf: PsfModel,
    pub fwhm: f64,
    pub t: f64,
    pub n: usize,
    pub alpha: f64,
    pub models: Vec<ModelKind>,
    pub method: Method,
    pub reps: usize,
}

impl SweepSpec {
    /// Small-sample defaults `t = 20`, `n = 20`, `FWHM = 0.2`, `α = 0.1`,
    /// Gaussian psf, all three models, Monte-Carlo with 10⁴ replications.
    pub fn small_sample(var: SweepVar, grid: Vec<f64>) -> Self {
        SweepSpec {
            var,
            grid,
            psf: PsfModel::gaussian_with_fwhm(0.2).expect("valid default psf"),
            fwhm: 0.2,
            t: 20.0,
            n: 20,
            alpha: 0.1,
            models: ModelKind::ALL.to_vec(),
            method: Method::MonteCarlo,
            reps: 10_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.len() < 3 {
            return Err(Error::param("sweep grid needs at least 3 values"));
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("sweep grid must be strictly increasing"));
        }
        if self.grid.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::param("sweep values must be positive"));
        }
        if self.models.is_empty() {
            return Err(Error::param("sweep needs at least one model"));
        }
        Ok(())
    }

    fn query(&self, kind: ModelKind, value: f64) -> Result<ResolutionQuery> {
        let (mut fwhm, mut t, mut n) = (self.fwhm, self.t, self.n);
        match self.var {
            SweepVar::Fwhm => fwhm = value,
            SweepVar::T => t = value,
            SweepVar::N => n = value.round() as usize,
        }
        Ok(ResolutionQuery::new(kind, self.psf.with_fwhm(fwhm)?, n, t, self.alpha))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual_rms: f64,
    pub xs: Vec<f64>,
    pub ds: Vec<f64>,
}

impl FitResult {
    /// Prefactor of the fitted power law `d = c·x^slope`.
    pub fn coefficient(&self) -> f64 {
        self.intercept.exp()
    }
}

/// Ordinary least squares of `ln d` on `ln x`.
pub fn loglog_fit(xs: &[f64], ds: &[f64]) -> Result<FitResult> {
    if xs.len() != ds.len() || xs.len() < 2 {
        return Err(Error::param("fit needs at least two (x, d) pairs"));
    }
    if xs.iter().chain(ds).any(|&v| !(v > 0.0)) {
        return Err(Error::param("log-log fit needs positive values"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ds.iter().map(|d| d.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::param("fit needs at least two distinct x values"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(FitResult { slope, intercept, residual_rms: (rss / k).sqrt(), xs: xs.to_vec(), ds: ds.to_vec() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub result: Option<ResolutionResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub model: ModelKind,
    pub points: Vec<SweepPoint>,
    /// Fit over the points that produced a resolution; `None` with fewer
    /// than two of them.
    pub fit: Option<FitResult>,
}

/// Resolution at every grid point for every model, then a log-log fit per
/// model. Point `(m, i)` draws from substream `[m, i]` of `state`.
pub fn simulation_sweep(spec: &SweepSpec, state: &RngState) -> Result<Vec<SweepOutcome>> {
    spec.validate()?;
    let opts = McOptions::with_reps(spec.reps);
    let jobs: Vec<(usize, usize)> =
        (0..spec.models.len()).flat_map(|m| (0..spec.grid.len()).map(move |i| (m, i))).collect();
    let results: Vec<Result<SweepPoint>> = jobs
        .par_iter()
        .map(|&(m, i)| {
            let value = spec.grid[i];
            let query = spec.query(spec.models[m], value)?;
            let point = match resolve(&query, spec.method, &opts, &state.derive(&[m as u64, i as u64])) {
                Ok(r) => SweepPoint { value, result: Some(r), error: None },
                Err(e @ (Error::NoResolution(_) | Error::Geometry(_))) => {
                    SweepPoint { value, result: None, error: Some(e.to_string()) }
                }
                Err(e) => return Err(e),
            };
            Ok(point)
        })
        .collect();
    let mut results = results.into_iter();
    spec.models
        .iter()
        .map(|&model| {
            let points: Vec<SweepPoint> = results.by_ref().take(spec.grid.len()).collect::<Result<_>>()?;
            let (xs, ds): (Vec<f64>, Vec<f64>) =
                points.iter().filter_map(|p| p.result.as_ref().map(|r| (p.value, r.d))).unzip();
            let fit = if xs.len() >= 2 { Some(loglog_fit(&xs, &ds)?) } else { None };
            Ok(SweepOutcome { model, points, fit })
        })
        .collect()
}

/// `points` log-spaced values covering `decades` decades, centred on `center`.
pub fn log_grid(center: f64, decades: f64, points: usize) -> Vec<f64> {
    let last = (points.max(2) - 1) as f64;
    (0..points.max(2)).map(|k| center * 10f64.powf(decades * (k as f64 / last - 0.5))).collect()
}

/// `lo:hi:step` grid, inclusive of `hi` up to rounding.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.trim().parse::<f64>().map_err(|_| Error::param(format!("bad number '{p}' in grid")));
    match parts.len() {
        3 => {
            let (lo, hi, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if !(step > 0.0) || hi < lo {
                return Err(Error::param("grid needs lo <= hi and step > 0"));
            }
            let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
            // round to the step's decimal precision so 0.15 + 4·0.01 prints as 0.19
            let digits = (-step.log10().floor()).max(0.0) as i32 + 2;
            let scale = 10f64.powi(digits);
            Ok((0..count).map(|i| ((lo + i as f64 * step) * scale).round() / scale).collect())
        }
        1 => s.split(',').map(num).collect(),
        _ => Err(Error::param(format!("grid '{s}' is neither lo:hi:step nor a comma list"))),
    }
}
