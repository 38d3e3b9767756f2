//! Observation models, likelihood-ratio statistics and error rates.
//!
//! Three models for the bin counts `Y₁…Yₙ` given detection probabilities
//! `pᵢ` and illumination `t`, each optionally thinned by `η`:
//!
//! | model   | law of `Yᵢ`            |
//! |---------|------------------------|
//! | Poisson | `Poi(ηtpᵢ)`            |
//! | VSG     | `N(2√(ηtpᵢ), 1)`       |
//! | HG      | `N(ηtpᵢ, 1)`           |
//!
//! The Gaussian models have exactly normal LRT statistics so level and
//! power are closed form; the Poisson model uses a CLT threshold or
//! simulation.

pub mod mc;
pub mod normal;
pub mod rng;
pub mod sampling;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::binning::BinProbabilities;
use crate::error::{Error, Result};
use normal::{normal_cdf, normal_quantile, normal_sf};
use rng::RngState;

pub use mc::{mc_error_rates, mc_power, simulate_statistics, ThresholdMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Poisson,
    Vsg,
    Hg,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Hg, ModelKind::Poisson, ModelKind::Vsg];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Poisson => "poisson",
            ModelKind::Vsg => "vsg",
            ModelKind::Hg => "hg",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "poisson" | "p" => Ok(ModelKind::Poisson),
            "vsg" => Ok(ModelKind::Vsg),
            "hg" => Ok(ModelKind::Hg),
            other => Err(Error::param(format!("unknown model '{other}' (expected poisson, vsg or hg)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: ModelKind,
    pub thinning: f64,
}

impl NoiseModel {
    pub fn new(kind: ModelKind) -> Self {
        NoiseModel { kind, thinning: 1.0 }
    }

    pub fn with_thinning(mut self, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::param(format!("thinning eta must lie in (0,1], got {eta}")));
        }
        self.thinning = eta;
        Ok(self)
    }

    /// Illumination after thinning, `ηt`.
    pub fn effective_t(&self, t: f64) -> f64 {
        self.thinning * t
    }
}

/// Which hypothesis generated the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    Null,
    Alternative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub threshold: f64,
    pub level: f64,
    pub power: f64,
    /// Binomial standard error of `power`; zero for closed-form reports.
    pub mc_se: f64,
    /// Binomial standard error of `level`; zero for closed-form reports.
    pub level_se: f64,
    pub reps: usize,
}

impl TestReport {
    fn analytic(threshold: f64, level: f64, power: f64) -> Self {
        TestReport { threshold, level, power, mc_se: 0.0, level_se: 0.0, reps: 0 }
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param(format!("illumination t must be > 0, got {t}")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(format!("alpha must lie in (0,1), got {alpha}")));
    }
    Ok(())
}

fn check_positive(probs: &BinProbabilities) -> Result<()> {
    if let Some(p) = probs.p0.iter().chain(&probs.p1).find(|&&p| !(p > 0.0)) {
        return Err(Error::ModelAssumption(format!("Poisson model needs every bin probability > 0, found {p}")));
    }
    Ok(())
}

/// Log-likelihood ratio `log(f₁(y)/f₀(y))` for the given model.
pub fn lrt_statistic(model: &NoiseModel, probs: &BinProbabilities, t: f64, y: &[f64]) -> Result<f64> {
    if y.len() != probs.n {
        return Err(Error::param(format!("observation length {} != bin count {}", y.len(), probs.n)));
    }
    check_t(t)?;
    let t = model.effective_t(t);
    let it = probs.p0.iter().zip(&probs.p1).zip(y);
    let v = match model.kind {
        ModelKind::Hg => {
            0.5 * it.map(|((&p0, &p1), &yi)| t * t * p0 * p0 - t * t * p1 * p1 + 2.0 * yi * t * (p1 - p0)).sum::<f64>()
        }
        ModelKind::Vsg => {
            it.map(|((&p0, &p1), &yi)| 2.0 * t * (p0 - p1) + 2.0 * yi * t.sqrt() * (p1.sqrt() - p0.sqrt())).sum()
        }
        ModelKind::Poisson => {
            check_positive(probs)?;
            it.map(|((&p0, &p1), &yi)| if yi == 0.0 { 0.0 } else { yi * (p1 / p0).ln() }).sum()
        }
    };
    Ok(v)
}

/// `μₙ = (t²/2) Σ (p1ᵢ − p0ᵢ)²` with `t → ηt`.
pub fn hg_mu(probs: &BinProbabilities, t: f64, eta: f64) -> f64 {
    let t = eta * t;
    let s: f64 = probs.p0.iter().zip(&probs.p1).map(|(a, b)| (b - a).powi(2)).sum();
    0.5 * t * t * s
}

/// `νₙ = 2t Σ (√p1ᵢ − √p0ᵢ)²` with `t → ηt`.
pub fn vsg_nu(probs: &BinProbabilities, t: f64, eta: f64) -> f64 {
    let t = eta * t;
    let s: f64 = probs.p0.iter().zip(&probs.p1).map(|(a, b)| (b.sqrt() - a.sqrt()).powi(2)).sum();
    2.0 * t * s
}

/// Separation statistic of a Gaussian model: `μₙ` for HG, `νₙ` for VSG.
pub fn gaussian_separation(model: &NoiseModel, probs: &BinProbabilities, t: f64) -> Result<f64> {
    match model.kind {
        ModelKind::Hg => Ok(hg_mu(probs, t, model.thinning)),
        ModelKind::Vsg => Ok(vsg_nu(probs, t, model.thinning)),
        ModelKind::Poisson => {
            Err(Error::Unsupported("closed-form error rates exist only for the HG and VSG models".into()))
        }
    }
}

/// Level and power of the exact normal LRT given its separation `m`.
pub fn gaussian_report(m: f64, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let q = normal_quantile(1.0 - alpha)?;
    let s = (2.0 * m).sqrt();
    Ok(TestReport::analytic(s * q - m, alpha, normal_cdf(s - q)))
}

/// Closed-form level and power for HG and VSG.
pub fn exact_error_rates(model: &NoiseModel, probs: &BinProbabilities, t: f64, alpha: f64) -> Result<TestReport> {
    check_t(t)?;
    let m = gaussian_separation(model, probs, t)?;
    gaussian_report(m, alpha)
}

/// Exact mean and variance of the Poisson LRT statistic under H0 and H1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonMoments {
    pub e0: f64,
    pub v0: f64,
    pub e1: f64,
    pub v1: f64,
}

pub fn poisson_moments(probs: &BinProbabilities, t: f64, eta: f64) -> Result<PoissonMoments> {
    check_t(t)?;
    check_positive(probs)?;
    let t = eta * t;
    let mut m = PoissonMoments { e0: 0.0, v0: 0.0, e1: 0.0, v1: 0.0 };
    for (&p0, &p1) in probs.p0.iter().zip(&probs.p1) {
        let a = (p1 / p0).ln();
        let (l0, l1) = (t * p0, t * p1);
        m.e0 += a * l0;
        m.v0 += a * a * l0;
        m.e1 += a * l1;
        m.v1 += a * a * l1;
    }
    Ok(m)
}

/// Poisson LRT with the CLT threshold `q_{1−α}√V₀ + E₀`.
pub fn poisson_clt_report(probs: &BinProbabilities, t: f64, eta: f64, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let m = poisson_moments(probs, t, eta)?;
    if m.v0 == 0.0 {
        return Ok(TestReport::analytic(m.e0, alpha, alpha));
    }
    let threshold = normal_quantile(1.0 - alpha)? * m.v0.sqrt() + m.e0;
    let power = if m.v1 == 0.0 { alpha } else { normal_sf((threshold - m.e1) / m.v1.sqrt()) };
    Ok(TestReport::analytic(threshold, alpha, power))
}

/// Analytic report for any model: exact for HG/VSG, CLT for Poisson.
pub fn analytic_report(model: &NoiseModel, probs: &BinProbabilities, t: f64, alpha: f64) -> Result<TestReport> {
    match model.kind {
        ModelKind::Poisson => poisson_clt_report(probs, t, model.thinning, alpha),
        _ => exact_error_rates(model, probs, t, alpha),
    }
}

/// The LRT in affine form `T(y) = offset + Σ wᵢ yᵢ` together with the
/// per-bin means of both hypotheses, ready for repeated sampling.
#[derive(Debug, Clone)]
pub struct LrtSetup {
    pub kind: ModelKind,
    pub offset: f64,
    pub weights: Vec<f64>,
    pub mean0: Vec<f64>,
    pub mean1: Vec<f64>,
}

impl LrtSetup {
    pub fn new(model: &NoiseModel, probs: &BinProbabilities, t: f64) -> Result<Self> {
        check_t(t)?;
        let t = model.effective_t(t);
        let p0 = &probs.p0;
        let p1 = &probs.p1;
        let (offset, weights, mean0, mean1) = match model.kind {
            ModelKind::Hg => {
                let off = 0.5 * t * t * p0.iter().zip(p1).map(|(a, b)| a * a - b * b).sum::<f64>();
                let w = p0.iter().zip(p1).map(|(a, b)| t * (b - a)).collect();
                (off, w, p0.iter().map(|p| t * p).collect(), p1.iter().map(|p| t * p).collect())
            }
            ModelKind::Vsg => {
                let off = 2.0 * t * p0.iter().zip(p1).map(|(a, b)| a - b).sum::<f64>();
                let w = p0.iter().zip(p1).map(|(a, b)| 2.0 * t.sqrt() * (b.sqrt() - a.sqrt())).collect();
                let mean = |p: &Vec<f64>| p.iter().map(|x| 2.0 * (t * x).sqrt()).collect();
                (off, w, mean(p0), mean(p1))
            }
            ModelKind::Poisson => {
                check_positive(probs)?;
                let w = p0.iter().zip(p1).map(|(a, b)| (b / a).ln()).collect();
                (0.0, w, p0.iter().map(|p| t * p).collect(), p1.iter().map(|p| t * p).collect())
            }
        };
        Ok(LrtSetup { kind: model.kind, offset, weights, mean0, mean1 })
    }

    pub fn statistic(&self, y: &[f64]) -> f64 {
        self.offset + self.weights.iter().zip(y).map(|(w, v)| w * v).sum::<f64>()
    }

    /// Draws one observation vector and returns its statistic.
    pub fn draw_statistic(&self, hyp: Hypothesis, rng: &mut rng::StreamRng) -> f64 {
        let means = match hyp {
            Hypothesis::Null => &self.mean0,
            Hypothesis::Alternative => &self.mean1,
        };
        let mut acc = self.offset;
        match self.kind {
            ModelKind::Poisson => {
                for (w, &m) in self.weights.iter().zip(means) {
                    let k = sampling::poisson(rng, m);
                    if k > 0 {
                        acc += w * k as f64;
                    }
                }
            }
            _ => {
                for (w, &m) in self.weights.iter().zip(means) {
                    acc += w * sampling::normal(rng, m);
                }
            }
        }
        acc
    }
}

/// One observation vector of length n drawn from the model with detection
/// probabilities `p` (either the H0 or the H1 side).
pub fn sample_observations(model: &NoiseModel, p: &[f64], t: f64, state: &RngState) -> Result<Vec<f64>> {
    check_t(t)?;
    let t = model.effective_t(t);
    let mut rng = state.generator();
    p.iter()
        .map(|&pi| match model.kind {
            ModelKind::Poisson => {
                if !(pi > 0.0) {
                    return Err(Error::ModelAssumption(format!("Poisson mean must be > 0, got {}", t * pi)));
                }
                Ok(sampling::poisson(&mut rng, t * pi) as f64)
            }
            ModelKind::Vsg => Ok(sampling::normal(&mut rng, 2.0 * (t * pi.max(0.0)).sqrt())),
            ModelKind::Hg => Ok(sampling::normal(&mut rng, t * pi)),
        })
        .collect()
}
