//! Numerical checks: sum-to-integral convergence and normality of the LRT
//! statistic.

use serde::{Deserialize, Serialize};

use crate::binning::BinProbabilities;
use crate::error::{Error, Result};
use crate::models::normal::normal_cdf;
use crate::models::rng::RngState;
use crate::models::{
    gaussian_separation, poisson_moments, simulate_statistics, Hypothesis, LrtSetup, ModelKind, NoiseModel,
};
use crate::quadrature::{bin_integral, grid_edges, pairwise_sum, unit_interval};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannRow {
    pub n: usize,
    /// `Σᵢ (∫ᵢ f)² / ∫ᵢ g`
    pub sum: f64,
    /// `∫₀¹ f²/g`
    pub integral: f64,
    pub gap: f64,
    pub relative_gap: f64,
}

/// Gap between `Σᵢ (∫ᵢ f)²/∫ᵢ g` on the n-bin grid and `∫₀¹ f²/g` for each
/// `n`. `feature` is the narrowest length scale of `f` and `g`.
pub fn riemann_convergence_check<F, G>(f: F, g: G, feature: f64, ns: &[usize]) -> Result<Vec<RiemannRow>>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if !(feature > 0.0) {
        return Err(Error::param("feature scale must be > 0"));
    }
    let panels = ((4.0 / feature).ceil() as usize).clamp(16, 100_000);
    let integrand = |x: f64| {
        let fx = f(x);
        fx * fx / g(x)
    };
    let integral = unit_interval(&integrand, panels, 1e-13);
    ns.iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::param("bin count must be >= 1"));
            }
            let edges = grid_edges(n);
            let mut terms = Vec::with_capacity(n);
            for w in edges.windows(2) {
                let fi = bin_integral(&f, w[0], w[1], feature);
                let gi = bin_integral(&g, w[0], w[1], feature);
                if !(gi > 0.0) {
                    return Err(Error::param(format!("g must be positive; bin [{}, {}] has mass {gi}", w[0], w[1])));
                }
                terms.push(fi * fi / gi);
            }
            let sum = pairwise_sum(&terms);
            let gap = (sum - integral).abs();
            Ok(RiemannRow { n, sum, integral, gap, relative_gap: gap / integral.abs() })
        })
        .collect()
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and
/// the standard normal.
pub fn ks_normal(samples: &[f64]) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = normal_cdf(x);
            (c - i as f64 / n).max((i + 1) as f64 / n - c)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub ks_null: f64,
    pub ks_alternative: f64,
    pub reps: usize,
}

/// KS distance from N(0,1) of the standardized LRT statistic under both
/// hypotheses. HG/VSG are standardized by `∓m` and `2m`; Poisson by its
/// exact means and variances.
pub fn normality_check(
    model: &NoiseModel,
    probs: &BinProbabilities,
    t: f64,
    reps: usize,
    state: &RngState,
) -> Result<NormalityReport> {
    let ((e0, v0), (e1, v1)) = match model.kind {
        ModelKind::Poisson => {
            let m = poisson_moments(probs, t, model.thinning)?;
            ((m.e0, m.v0), (m.e1, m.v1))
        }
        _ => {
            let m = gaussian_separation(model, probs, t)?;
            ((-m, 2.0 * m), (m, 2.0 * m))
        }
    };
    if !(v0 > 0.0 && v1 > 0.0) {
        return Err(Error::param("statistic is degenerate (hypotheses coincide)"));
    }
    let setup = LrtSetup::new(model, probs, t)?;
    let standardize = |xs: Vec<f64>, e: f64, v: f64| -> Vec<f64> {
        let s = v.sqrt();
        xs.into_iter().map(|x| (x - e) / s).collect()
    };
    let null = standardize(simulate_statistics(&setup, Hypothesis::Null, reps, &state.substream(0)), e0, v0);
    let alt = standardize(simulate_statistics(&setup, Hypothesis::Alternative, reps, &state.substream(1)), e1, v1);
    Ok(NormalityReport { ks_null: ks_normal(&null), ks_alternative: ks_normal(&alt), reps })
}
