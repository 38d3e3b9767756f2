//! Closed-form coefficient tables for the Gaussian psf.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::normal::{normal_quantile, normal_sf};

/// `2^{1/4}/√(log 2)`: Poisson/VSG resolution per `√q_{1−α} t^{−1/4} FWHM`.
pub fn poisson_coefficient_base() -> f64 {
    2f64.powf(0.25) / LN_2.sqrt()
}

/// `2^{7/8}π^{1/8}/(3^{1/4}(log 2)^{5/8})`: HG resolution per
/// `√q_{1−α} n^{1/4} t^{−1/2} FWHM^{5/4}`.
pub fn hg_coefficient_base() -> f64 {
    2f64.powf(7.0 / 8.0) * PI.powf(1.0 / 8.0) / (3f64.powf(0.25) * LN_2.powf(5.0 / 8.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub alpha: f64,
    /// HG coefficient of `t^{−1/4} FWHM^{5/4}` with `n = t`.
    pub hg: f64,
    /// Poisson/VSG coefficient of `t^{−1/4} FWHM`.
    pub poisson_vsg: f64,
}

/// Asymptotic resolution coefficients with `α = β`.
pub fn table1(alphas: &[f64]) -> Result<Vec<Table1Row>> {
    alphas
        .iter()
        .map(|&alpha| {
            if !(alpha > 0.0 && alpha < 0.5) {
                return Err(Error::param(format!("alpha must lie in (0, 1/2), got {alpha}")));
            }
            let root = normal_quantile(1.0 - alpha)?.sqrt();
            Ok(Table1Row { alpha, hg: hg_coefficient_base() * root, poisson_vsg: poisson_coefficient_base() * root })
        })
        .collect()
}

/// Classical two-point criteria expressed as multiples of the Airy FWHM
/// (`FWHM = 0.51 λ/NA`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// `λ/(2NA)`
    Abbe,
    /// `0.61 λ/NA`
    Rayleigh,
}

impl Criterion {
    pub fn fwhm_ratio(&self) -> f64 {
        match self {
            Criterion::Abbe => 1.0 / (2.0 * 0.51),
            Criterion::Rayleigh => 0.61 / 0.51,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Criterion::Abbe => "abbe",
            Criterion::Rayleigh => "rayleigh",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "abbe" => Ok(Criterion::Abbe),
            "rayleigh" => Ok(Criterion::Rayleigh),
            other => Err(Error::param(format!("unknown criterion '{other}'"))),
        }
    }
}

/// Error level `α = β` at which the Poisson/VSG asymptotic resolution
/// equals the classical criterion distance for illumination `t`.
pub fn criterion_alpha(criterion: Criterion, t: f64) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::param(format!("illumination t must be >= 1, got {t}")));
    }
    let q = (criterion.fwhm_ratio() / poisson_coefficient_base()).powi(2) * t.sqrt();
    Ok(normal_sf(q))
}

/// Resolution gain of STED over confocal when the FWHM shrinks by `ratio`
/// and the photon budget shrinks with it: `ratio^{3/4}`.
pub fn sted_improvement(fwhm_ratio: f64) -> Result<f64> {
    if !(fwhm_ratio >= 1.0) {
        return Err(Error::param(format!("FWHM ratio must be >= 1, got {fwhm_ratio}")));
    }
    Ok(fwhm_ratio.powf(0.75))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_sig(x: f64) -> f64 {
        let e = x.abs().log10().floor() - 2.0;
        (x / 10f64.powf(e)).round() * 10f64.powf(e)
    }

    #[test]
    fn coefficient_bases() {
        assert!((poisson_coefficient_base() - 1.428_3).abs() < 1e-4);
        // 8π^{1/8}/6^{1/4} per σ^{5/4} equals the FWHM form
        let via_sigma = 8.0 * PI.powf(0.125) / 6f64.powf(0.25);
        let fwhm_per_sigma = crate::psf::GAUSSIAN_FWHM_PER_SIGMA;
        assert!((via_sigma - hg_coefficient_base() * fwhm_per_sigma.powf(1.25)).abs() < 1e-12);
    }

    #[test]
    fn table1_reference_values() {
        let rows = table1(&[0.01, 0.05, 0.1]).unwrap();
        let want = [(3.08, 2.18), (2.59, 1.83), (2.29, 1.62)];
        for (r, (hg, p)) in rows.iter().zip(want) {
            assert!((r.hg - hg).abs() <= 0.005, "{r:?}");
            assert!((r.poisson_vsg - p).abs() <= 0.005, "{r:?}");
        }
        assert!(rows[0].hg > rows[1].hg && rows[1].hg > rows[2].hg);
        assert!(table1(&[0.6]).is_err());
    }

    #[test]
    fn table2_reference_values() {
        let abbe = [6.81e-2, 1.76e-2, 0.494e-2, 0.144e-2, 0.0432e-2];
        let rayleigh = [1.33e-2, 0.0857e-2, 0.00614e-2, 4.61e-6, 3.56e-7];
        for (i, t) in [10.0, 20.0, 30.0, 40.0, 50.0].iter().enumerate() {
            assert_eq!(three_sig(criterion_alpha(Criterion::Abbe, *t).unwrap()), three_sig(abbe[i]));
            assert_eq!(three_sig(criterion_alpha(Criterion::Rayleigh, *t).unwrap()), three_sig(rayleigh[i]));
        }
    }

    #[test]
    fn sted_values() {
        assert!((sted_improvement(6.0).unwrap() - 3.833_658_625_477_635).abs() < 1e-12);
        assert_eq!(sted_improvement(1.0).unwrap(), 1.0);
        assert!((sted_improvement(16.0).unwrap() - 8.0).abs() < 1e-12);
        assert!(sted_improvement(0.5).is_err());
    }
}
