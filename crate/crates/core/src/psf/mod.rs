//! Point spread functions on the unit interval.
//!
//! A [`PsfModel`] is an even kernel `h` plus an additive background
//! pedestal `γ`; the observed intensity profile of a point source at `x0`
//! is `h(x − x0) + γ`. Kernels are unit-mass densities on the real line and
//! are deliberately not renormalized to the unit interval.

pub mod bessel;

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// `2√(2 log 2)`, the Gaussian FWHM in units of σ.
pub const GAUSSIAN_FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

/// Full width at half maximum of `|2J₁(u)/u|²` in units of `u`.
pub const AIRY_DIMENSIONLESS_FWHM: f64 = 3.232_679_896_621_406_4;

/// Step for the finite-difference derivatives of kernels without a
/// closed-form derivative.
pub const FD_STEP: f64 = 1e-4;

/// Relative tolerance for Airy integrals of `h''`; the finite difference
/// carries round-off near `1e-8` of the peak curvature, so a tighter target
/// would only chase noise.
const AIRY_FUNCTIONAL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PsfKind {
    Gaussian { sigma: f64 },
    Airy { fwhm: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsfModel {
    pub kind: PsfKind,
    pub background: f64,
}

impl PsfModel {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::param(format!("gaussian sigma must be > 0, got {sigma}")));
        }
        Ok(PsfModel { kind: PsfKind::Gaussian { sigma }, background: 0.0 })
    }

    pub fn gaussian_with_fwhm(fwhm: f64) -> Result<Self> {
        Self::gaussian(fwhm / GAUSSIAN_FWHM_PER_SIGMA)
    }

    pub fn airy(fwhm: f64) -> Result<Self> {
        if !(fwhm > 0.0 && fwhm.is_finite()) {
            return Err(Error::param(format!("airy fwhm must be > 0, got {fwhm}")));
        }
        Ok(PsfModel { kind: PsfKind::Airy { fwhm }, background: 0.0 })
    }

    pub fn with_background(mut self, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::param(format!("background must be >= 0, got {gamma}")));
        }
        self.background = gamma;
        Ok(self)
    }

    /// Same kernel family rescaled to the given FWHM; background is kept.
    pub fn with_fwhm(&self, fwhm: f64) -> Result<Self> {
        let base = match self.kind {
            PsfKind::Gaussian { .. } => Self::gaussian_with_fwhm(fwhm)?,
            PsfKind::Airy { .. } => Self::airy(fwhm)?,
        };
        base.with_background(self.background)
    }

    /// Kernel value `h(u)` without the background.
    pub fn kernel(&self, u: f64) -> f64 {
        match self.kind {
            PsfKind::Gaussian { sigma } => gaussian_density(u, sigma),
            PsfKind::Airy { fwhm } => {
                let k = AIRY_DIMENSIONLESS_FWHM / fwhm;
                let a = bessel::airy_amplitude(k * u.abs());
                airy_peak(fwhm) * a * a
            }
        }
    }

    /// Observed intensity `h(u) + γ`.
    pub fn eval(&self, u: f64) -> f64 {
        self.kernel(u) + self.background
    }

    pub fn first_derivative(&self, u: f64) -> f64 {
        match self.kind {
            PsfKind::Gaussian { sigma } => -u / (sigma * sigma) * gaussian_density(u, sigma),
            // odd by construction, so mirrored sources stay bit-for-bit symmetric
            PsfKind::Airy { .. } => u.signum() * self.fd_first_derivative(u.abs()),
        }
    }

    /// `h''(u)`; exact for the Gaussian, finite differences for Airy.
    pub fn second_derivative(&self, u: f64) -> f64 {
        match self.kind {
            PsfKind::Gaussian { sigma } => {
                let s2 = sigma * sigma;
                gaussian_density(u, sigma) * (u * u / (s2 * s2) - 1.0 / s2)
            }
            PsfKind::Airy { .. } => self.fd_second_derivative(u.abs()),
        }
    }

    /// Central second difference with step [`FD_STEP`], Richardson
    /// extrapolated once. Works for any kernel.
    pub fn fd_second_derivative(&self, u: f64) -> f64 {
        let d = |h: f64| (self.kernel(u + h) - 2.0 * self.kernel(u) + self.kernel(u - h)) / (h * h);
        let coarse = d(FD_STEP);
        let fine = d(0.5 * FD_STEP);
        (4.0 * fine - coarse) / 3.0
    }

    pub fn fd_first_derivative(&self, u: f64) -> f64 {
        let d = |h: f64| (self.kernel(u + h) - self.kernel(u - h)) / (2.0 * h);
        let coarse = d(FD_STEP);
        let fine = d(0.5 * FD_STEP);
        (4.0 * fine - coarse) / 3.0
    }

    pub fn fwhm(&self) -> f64 {
        match self.kind {
            PsfKind::Gaussian { sigma } => GAUSSIAN_FWHM_PER_SIGMA * sigma,
            PsfKind::Airy { fwhm } => fwhm,
        }
    }

    /// FWHM found by bisection on `h(u) = h(0)/2` (background ignored).
    pub fn numeric_fwhm(&self) -> f64 {
        let half = 0.5 * self.kernel(0.0);
        let mut hi = self.fwhm().max(f64::MIN_POSITIVE);
        while self.kernel(hi) > half {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.kernel(mid) > half {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo + hi
    }

    /// Width scale used to size quadrature panels.
    pub fn scale(&self) -> f64 {
        match self.kind {
            PsfKind::Gaussian { sigma } => sigma,
            PsfKind::Airy { fwhm } => fwhm / 2.0,
        }
    }

    /// `∫_0^1 h(x − x0) dx`, background excluded.
    pub fn mass_on_unit_interval(&self, x0: f64) -> f64 {
        match self.kind {
            PsfKind::Gaussian { sigma } => {
                let s = sigma * std::f64::consts::SQRT_2;
                0.5 * (libm::erf((1.0 - x0) / s) + libm::erf(x0 / s))
            }
            PsfKind::Airy { .. } => {
                let f = |x: f64| self.kernel(x - x0);
                quadrature::unit_interval(&f, self.panels(), 1e-13)
            }
        }
    }

    /// Logs a warning and returns false when more than 1% of the kernel
    /// mass of a source at `x0` falls outside the unit interval.
    pub fn check_containment(&self, x0: f64) -> bool {
        let mass = self.mass_on_unit_interval(x0);
        let ok = (1.0 - mass).abs() <= 0.01;
        if !ok {
            log::warn!("psf mass on [0,1] for a source at {x0} is {mass:.4}; kernel is truncated by the field of view");
        }
        ok
    }

    pub(crate) fn panels(&self) -> usize {
        ((4.0 / self.scale()).ceil() as usize).clamp(16, 20_000)
    }

    /// `∫_0^1 h''(x − x0)² dx`.
    pub fn curvature_integral(&self, x0: f64) -> Result<f64> {
        match self.kind {
            PsfKind::Gaussian { sigma } => gaussian_curvature_integral(sigma, x0),
            PsfKind::Airy { .. } => {
                let f = |x: f64| self.second_derivative(x - x0).powi(2);
                Ok(quadrature::unit_interval(&f, self.panels(), AIRY_FUNCTIONAL_TOL))
            }
        }
    }

    /// `∫_0^1 h''(x − x0)² / (h(x − x0) + γ) dx`.
    pub fn fisher_integral(&self, x0: f64) -> Result<f64> {
        match self.kind {
            PsfKind::Gaussian { sigma } => gaussian_fisher_integral(sigma, x0, self.background),
            PsfKind::Airy { .. } => {
                let f = |x: f64| {
                    let u = x - x0;
                    self.second_derivative(u).powi(2) / self.eval(u)
                };
                Ok(quadrature::unit_interval(&f, self.panels(), AIRY_FUNCTIONAL_TOL))
            }
        }
    }
}

fn gaussian_density(u: f64, sigma: f64) -> f64 {
    let z = u / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
}

/// Peak value of the unit-mass Airy line profile: `∫(2J₁(u)/u)² du = 32/(3π)`.
fn airy_peak(fwhm: f64) -> f64 {
    let k = AIRY_DIMENSIONLESS_FWHM / fwhm;
    k * 3.0 * PI / 32.0
}

/// STED-narrowed FWHM `fwhm / √(1 + ξ)`.
pub fn sted_narrow(fwhm: f64, xi: f64) -> Result<f64> {
    if !(xi >= 0.0) {
        return Err(Error::param(format!("STED shrinkage factor must be >= 0, got {xi}")));
    }
    Ok(fwhm / (1.0 + xi).sqrt())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::param(format!("sigma must be > 0, got {sigma}")));
    }
    Ok(())
}

fn gaussian_second(u: f64, sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    gaussian_density(u, sigma) * (u * u / (s2 * s2) - 1.0 / s2)
}

fn gaussian_panels(sigma: f64) -> usize {
    ((4.0 / sigma).ceil() as usize).clamp(16, 20_000)
}

/// `∫_0^1 h''(x − x0)² dx` for the Gaussian kernel. Closed form at the
/// centre of the field, quadrature elsewhere.
pub fn gaussian_curvature_integral(sigma: f64, x0: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if x0 == 0.5 {
        let s3 = sigma.powi(3);
        let num = 6.0 * PI.sqrt() * s3 * libm::erf(1.0 / (2.0 * sigma))
            + (-1.0 / (4.0 * sigma * sigma)).exp() * (2.0 * sigma * sigma - 1.0);
        return Ok(num / (16.0 * PI * sigma.powi(8)));
    }
    let f = |x: f64| gaussian_second(x - x0, sigma).powi(2);
    Ok(quadrature::unit_interval(&f, gaussian_panels(sigma), 1e-13))
}

/// `∫_0^1 h''(x − x0)² / (h(x − x0) + γ) dx` for the Gaussian kernel.
/// Closed form for `γ = 0` at the centre of the field, quadrature otherwise.
pub fn gaussian_fisher_integral(sigma: f64, x0: f64, gamma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if !(gamma >= 0.0) {
        return Err(Error::param(format!("background must be >= 0, got {gamma}")));
    }
    if gamma == 0.0 && x0 == 0.5 {
        let a = 2.0 * libm::erf(1.0 / (2.0 * std::f64::consts::SQRT_2 * sigma)) / sigma.powi(4);
        let b = (-1.0 / (8.0 * sigma * sigma)).exp() * (4.0 * sigma * sigma + 1.0)
            / (4.0 * (2.0 * PI).sqrt() * sigma.powi(7));
        return Ok(a - b);
    }
    let f = |x: f64| {
        let u = x - x0;
        let h = gaussian_density(u, sigma);
        let s2 = sigma * sigma;
        // h''²/h = h·(u²/σ⁴ − 1/σ²)² avoids 0/0 in the far tails when γ = 0
        let c = u * u / (s2 * s2) - 1.0 / s2;
        if gamma == 0.0 {
            h * c * c
        } else {
            (h * c).powi(2) / (h + gamma)
        }
    };
    Ok(quadrature::unit_interval(&f, gaussian_panels(sigma), 1e-13))
}

/// FWHM of the Gaussian with the given σ.
pub fn gaussian_fwhm(sigma: f64) -> f64 {
    2.0 * (2.0 * LN_2).sqrt() * sigma
}
