//! Per-bin detection probabilities on the uniform n-bin grid over [0, 1].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psf::PsfModel;
use crate::quadrature::{bin_integral, grid_edges};

const PARALLEL_BINS: usize = 512;

/// One source at `x0` under H0 against two sources `d` apart with weights
/// `q` and `1 − q` under H1, whose intensity-weighted centre is `x0 − λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    pub x0: f64,
    pub d: f64,
    pub weight_q: f64,
    pub offset_lambda: f64,
}

impl SourceConfig {
    /// Equal weights, centred at `x0`.
    pub fn symmetric(x0: f64, d: f64) -> Self {
        SourceConfig { x0, d, weight_q: 0.5, offset_lambda: 0.0 }
    }

    pub fn with_weight(mut self, q: f64) -> Self {
        self.weight_q = q;
        self
    }

    pub fn with_offset(mut self, lambda: f64) -> Self {
        self.offset_lambda = lambda;
        self
    }

    pub fn with_separation(mut self, d: f64) -> Self {
        self.d = d;
        self
    }

    /// `(x1, x2)`; `x1 = x0 − λ − (1−q)d` and `x2 = x0 − λ + qd`.
    pub fn positions(&self) -> (f64, f64) {
        let c = self.x0 - self.offset_lambda;
        (c - (1.0 - self.weight_q) * self.d, c + self.weight_q * self.d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.weight_q > 0.0 && self.weight_q < 1.0) {
            return Err(Error::param(format!("weight q must lie in (0,1), got {}", self.weight_q)));
        }
        if !(self.d >= 0.0 && self.d.is_finite()) {
            return Err(Error::param(format!("separation must be >= 0, got {}", self.d)));
        }
        let inside = |x: f64| x > 0.0 && x < 1.0;
        let (x1, x2) = self.positions();
        if !inside(self.x0) || !inside(x1) || !inside(x2) {
            return Err(Error::geometry(format!("sources must lie in (0,1): x0={}, x1={x1}, x2={x2}", self.x0)));
        }
        Ok(())
    }

    fn coincident(&self) -> bool {
        self.d == 0.0 && self.offset_lambda == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinProbabilities {
    pub n: usize,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
}

impl BinProbabilities {
    pub fn new(p0: Vec<f64>, p1: Vec<f64>) -> Result<Self> {
        if p0.len() != p1.len() || p0.is_empty() {
            return Err(Error::param("p0 and p1 must be non-empty and of equal length"));
        }
        Ok(BinProbabilities { n: p0.len(), p0, p1 })
    }

    pub fn min_p0(&self) -> f64 {
        self.p0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn min_positive(&self) -> bool {
        self.p0.iter().chain(&self.p1).all(|&p| p > 0.0)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::param("bin count n must be >= 1"));
    }
    Ok(())
}

fn per_bin<F>(n: usize, f: F) -> Vec<f64>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let edges = grid_edges(n);
    if n >= PARALLEL_BINS {
        (0..n).into_par_iter().map(|i| f(edges[i], edges[i + 1])).collect()
    } else {
        (0..n).map(|i| f(edges[i], edges[i + 1])).collect()
    }
}

/// Detection probabilities `p0ᵢ = ∫ᵢ (h+γ)(x − x0)` and
/// `p1ᵢ = q ∫ᵢ (h+γ)(x − x1) + (1−q) ∫ᵢ (h+γ)(x − x2)`.
pub fn bin_probabilities(psf: &PsfModel, src: &SourceConfig, n: usize) -> Result<BinProbabilities> {
    check_n(n)?;
    src.validate()?;
    let (x1, x2) = src.positions();
    for x in [src.x0, x1, x2] {
        psf.check_containment(x);
    }
    let gamma = psf.background;
    let q = src.weight_q;
    let feature = psf.scale();
    let kernel_mass = |x: f64, a: f64, b: f64| bin_integral(&|y: f64| psf.kernel(y - x), a, b, feature);
    let p0 = per_bin(n, |a, b| kernel_mass(src.x0, a, b) + gamma * (b - a));
    let p1 = if src.coincident() {
        p0.clone()
    } else if x1 == x2 {
        per_bin(n, |a, b| kernel_mass(x1, a, b) + gamma * (b - a))
    } else {
        per_bin(n, |a, b| q * kernel_mass(x1, a, b) + (1.0 - q) * kernel_mass(x2, a, b) + gamma * (b - a))
    };
    Ok(BinProbabilities { n, p0, p1 })
}

/// Pointwise H1 − H0 intensity difference `q h(x−x1) + (1−q) h(x−x2) − h(x−x0)`.
pub fn delta_profile(psf: &PsfModel, src: &SourceConfig, x: f64) -> f64 {
    if src.coincident() {
        return 0.0;
    }
    let (x1, x2) = src.positions();
    let q = src.weight_q;
    q * psf.kernel(x - x1) + (1.0 - q) * psf.kernel(x - x2) - psf.kernel(x - src.x0)
}

/// `∫ᵢ h''(x − x0) = h'(bᵢ − x0) − h'(aᵢ − x0)` for every bin.
pub fn curvature_bin_integrals(psf: &PsfModel, x0: f64, n: usize) -> Result<Vec<f64>> {
    check_n(n)?;
    Ok(per_bin(n, |a, b| psf.first_derivative(b - x0) - psf.first_derivative(a - x0)))
}

/// `∫ᵢ (h + γ)(x − x0)` for every bin.
pub fn intensity_bin_integrals(psf: &PsfModel, x0: f64, n: usize) -> Result<Vec<f64>> {
    check_n(n)?;
    let gamma = psf.background;
    let feature = psf.scale();
    Ok(per_bin(n, |a, b| bin_integral(&|y: f64| psf.kernel(y - x0), a, b, feature) + gamma * (b - a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::pairwise_sum;

    fn gauss(sigma: f64) -> PsfModel {
        PsfModel::gaussian(sigma).unwrap()
    }

    #[test]
    fn zero_separation_gives_identical_vectors() {
        for q in [0.2, 0.5, 0.9] {
            let src = SourceConfig::symmetric(0.5, 0.0).with_weight(q);
            let b = bin_probabilities(&gauss(0.05), &src, 17).unwrap();
            assert_eq!(b.p0, b.p1);
        }
    }

    #[test]
    fn two_bins_split_evenly() {
        let b = bin_probabilities(&gauss(0.05), &SourceConfig::symmetric(0.5, 0.0), 2).unwrap();
        assert!((b.p0[0] - 0.5).abs() < 1e-10);
        assert!((b.p0[1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn total_mass_matches_gaussian_cdf() {
        let b = bin_probabilities(&gauss(0.05), &SourceConfig::symmetric(0.5, 0.0), 20).unwrap();
        let want = libm::erf(0.5 / (std::f64::consts::SQRT_2 * 0.05));
        assert!((pairwise_sum(&b.p0) - want).abs() < 1e-12);
    }

    #[test]
    fn background_adds_uniform_pedestal() {
        let p = gauss(0.05).with_background(2.0).unwrap();
        let b = bin_probabilities(&p, &SourceConfig::symmetric(0.5, 0.1), 10).unwrap();
        assert!((pairwise_sum(&b.p0) - 3.0).abs() < 1e-9);
        assert!((pairwise_sum(&b.p1) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn geometry_and_parameter_errors() {
        let p = gauss(0.05);
        assert!(matches!(bin_probabilities(&p, &SourceConfig::symmetric(0.5, 1.2), 10), Err(Error::Geometry(_))));
        assert!(matches!(bin_probabilities(&p, &SourceConfig::symmetric(0.5, 0.1), 0), Err(Error::Parameter(_))));
        assert!(bin_probabilities(&p, &SourceConfig::symmetric(0.5, 0.1).with_weight(1.0), 4).is_err());
    }

    #[test]
    fn positions_follow_weight_convention() {
        let s = SourceConfig::symmetric(0.5, 0.2).with_weight(0.25).with_offset(0.01);
        let (x1, x2) = s.positions();
        assert!((x1 - (0.49 - 0.15)).abs() < 1e-15);
        assert!((x2 - (0.49 + 0.05)).abs() < 1e-15);
        // weighted centre
        assert!((0.25 * x1 + 0.75 * x2 - 0.49).abs() < 1e-15);
    }

    #[test]
    fn delta_profile_small_separation_follows_curvature() {
        let p = gauss(0.2 / crate::psf::GAUSSIAN_FWHM_PER_SIGMA);
        let x = 0.43;
        let mut prev = f64::INFINITY;
        for frac in [0.05, 0.02, 0.01] {
            let d = frac * p.fwhm();
            let src = SourceConfig::symmetric(0.5, d);
            let approx = d * d / 8.0 * p.second_derivative(x - 0.5);
            let err = (delta_profile(&p, &src, x) - approx).abs() / approx.abs();
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn delta_profile_general_weight() {
        let p = gauss(0.08);
        let q = 0.3;
        let x = 0.53;
        let mut prev = f64::INFINITY;
        for d in [0.01, 0.004, 0.001] {
            let src = SourceConfig::symmetric(0.5, d).with_weight(q);
            let approx = q * (1.0 - q) * d * d / 2.0 * p.second_derivative(x - 0.5);
            let err = (delta_profile(&p, &src, x) - approx).abs() / approx.abs();
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 1e-2);
        assert_eq!(delta_profile(&p, &SourceConfig::symmetric(0.5, 0.0), 0.3), 0.0);
    }

    #[test]
    fn curvature_bins_sum_to_derivative_difference() {
        let p = gauss(0.1);
        let v = curvature_bin_integrals(&p, 0.5, 50).unwrap();
        let total: f64 = v.iter().sum();
        let want = p.first_derivative(0.5) - p.first_derivative(-0.5);
        assert!((total - want).abs() < 1e-10);
    }
}
