//! Solving for the statistical resolution `d`.
//!
//! Four routes: the asymptotic formulas, their finite-n sum versions, exact
//! root-finding on the closed-form power of the Gaussian models, and
//! Monte-Carlo bisection on the simulated type II error.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::binning::{bin_probabilities, curvature_bin_integrals, intensity_bin_integrals, SourceConfig};
use crate::error::{Error, Result};
use crate::models::normal::{normal_cdf, normal_quantile};
use crate::models::rng::RngState;
use crate::models::{analytic_report, gaussian_separation, mc_power, LrtSetup, ModelKind, NoiseModel};
use crate::psf::PsfModel;

/// Everything that determines a resolution problem. The background `γ`
/// lives on the psf and the thinning `η` on the noise model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolutionQuery {
    pub model: NoiseModel,
    pub psf: PsfModel,
    pub x0: f64,
    pub weight_q: f64,
    pub n: usize,
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl ResolutionQuery {
    /// Centred, equal-weight query with `α = β`.
    pub fn new(kind: ModelKind, psf: PsfModel, n: usize, t: f64, alpha: f64) -> Self {
        ResolutionQuery { model: NoiseModel::new(kind), psf, x0: 0.5, weight_q: 0.5, n, t, alpha, beta: alpha }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(v > 0.0 && v < 0.5) {
                return Err(Error::param(format!("{name} must lie in (0, 1/2), got {v}")));
            }
        }
        if !(self.t >= 1.0 && self.t.is_finite()) {
            return Err(Error::param(format!("illumination t must be >= 1, got {}", self.t)));
        }
        if self.n == 0 {
            return Err(Error::param("bin count n must be >= 1"));
        }
        if !(self.weight_q > 0.0 && self.weight_q < 1.0) {
            return Err(Error::param(format!("weight q must lie in (0,1), got {}", self.weight_q)));
        }
        if !(self.x0 > 0.0 && self.x0 < 1.0) {
            return Err(Error::geometry(format!("x0 must lie in (0,1), got {}", self.x0)));
        }
        Ok(())
    }

    pub fn source(&self, d: f64) -> SourceConfig {
        SourceConfig::symmetric(self.x0, d).with_weight(self.weight_q)
    }

    /// `√2/√(q(1−q)) · √(q_{1−β} − q_α)`; equals `2√2·√(…)` at `q = 1/2`.
    fn prefactor(&self) -> Result<f64> {
        let gap = normal_quantile(1.0 - self.beta)? - normal_quantile(self.alpha)?;
        if !(gap > 0.0) {
            return Err(Error::param("q_{1-beta} must exceed q_alpha"));
        }
        let q = self.weight_q;
        Ok(std::f64::consts::SQRT_2 / (q * (1.0 - q)).sqrt() * gap.sqrt())
    }

    /// Separation target `(q_{1−α} − q_β)²/2` of the exact Gaussian tests.
    pub fn separation_target(&self) -> Result<f64> {
        let gap = normal_quantile(1.0 - self.alpha)? - normal_quantile(self.beta)?;
        Ok(0.5 * gap * gap)
    }

    /// Largest separation keeping both sources strictly inside `(lo, 1−lo)`.
    fn geometric_limit(&self, margin: f64) -> f64 {
        let q = self.weight_q;
        ((self.x0 - margin) / (1.0 - q)).min((1.0 - margin - self.x0) / q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Asymptotic,
    FiniteN,
    Exact,
    MonteCarlo,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Asymptotic => "asymptotic",
            Method::FiniteN => "finite-n",
            Method::Exact => "exact",
            Method::MonteCarlo => "mc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asymptotic" => Ok(Method::Asymptotic),
            "finite-n" | "finite_n" => Ok(Method::FiniteN),
            "exact" => Ok(Method::Exact),
            "mc" | "monte-carlo" | "monte_carlo" => Ok(Method::MonteCarlo),
            other => Err(Error::param(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    /// Power of the test at the returned `d` (analytic or simulated).
    pub power: Option<f64>,
    /// Simulated type II error at the returned `d`.
    pub beta_hat: Option<f64>,
    pub mc_se: Option<f64>,
    pub reps: Option<usize>,
    pub converged: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionResult {
    pub d: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

/// Asymptotic resolution for any model, general weight, background and
/// thinning.
pub fn asymptotic_resolution(q: &ResolutionQuery) -> Result<ResolutionResult> {
    q.validate()?;
    let pre = q.prefactor()?;
    let eta = q.model.thinning;
    let mut diagnostics = Diagnostics { converged: true, ..Default::default() };
    let d = match q.model.kind {
        ModelKind::Poisson | ModelKind::Vsg => {
            let fisher = q.psf.fisher_integral(q.x0)?;
            pre * (eta * fisher).powf(-0.25) * q.t.powf(-0.25)
        }
        ModelKind::Hg => {
            let curvature = q.psf.curvature_integral(q.x0)?;
            let n = q.n as f64;
            if n >= q.t * q.t {
                diagnostics.notes.push("n >= t^2: outside the regime where the HG formula is guaranteed".into());
            }
            pre * (eta * eta * curvature).powf(-0.25) * q.t.powf(-0.5) * n.powf(0.25)
        }
    };
    Ok(ResolutionResult { d, method: Method::Asymptotic, diagnostics })
}

/// Finite-n version of the Gaussian-model formulas, with bin sums in place
/// of the integrals.
pub fn finite_n_resolution(q: &ResolutionQuery) -> Result<ResolutionResult> {
    q.validate()?;
    let pre = q.prefactor()?;
    let eta = q.model.thinning;
    let curv = curvature_bin_integrals(&q.psf, q.x0, q.n)?;
    let d = match q.model.kind {
        ModelKind::Hg => {
            let s: f64 = curv.iter().map(|c| c * c).sum();
            pre * (eta * eta * s).powf(-0.25) * q.t.powf(-0.5)
        }
        ModelKind::Vsg => {
            let mass = intensity_bin_integrals(&q.psf, q.x0, q.n)?;
            let s: f64 = curv.iter().zip(&mass).map(|(c, m)| c * c / m).sum();
            pre * (eta * s).powf(-0.25) * q.t.powf(-0.25)
        }
        ModelKind::Poisson => {
            return Err(Error::Unsupported(
                "finite-n formula is defined for HG and VSG; use VSG for the Poisson value".into(),
            ))
        }
    };
    Ok(ResolutionResult {
        d,
        method: Method::FiniteN,
        diagnostics: Diagnostics { converged: true, ..Default::default() },
    })
}

const EXACT_MAX_ITER: usize = 200;
const EXACT_SEPARATION_TOL: f64 = 1e-10;
const EXACT_INTERVAL_TOL: f64 = 1e-12;

/// Root of `m(d) = (q_{1−α} − q_β)²/2` for the exact HG/VSG tests. A
/// Poisson query is answered with the VSG solver and says so in the notes.
pub fn exact_resolution(q: &ResolutionQuery) -> Result<ResolutionResult> {
    q.validate()?;
    let mut notes = Vec::new();
    let mut model = q.model;
    if model.kind == ModelKind::Poisson {
        model.kind = ModelKind::Vsg;
        notes.push("poisson: exact VSG solver used as the reference (asymptotically equivalent models)".into());
    }
    let target = q.separation_target()?;
    let m = |d: f64| -> Result<f64> {
        let probs = bin_probabilities(&q.psf, &q.source(d), q.n)?;
        gaussian_separation(&model, &probs, q.t)
    };
    let limit = q.geometric_limit(0.0) * (1.0 - 1e-9);
    let mut hi = 0.5f64.min(limit);
    if m(hi)? < target {
        hi = limit;
        if m(hi)? < target {
            return Err(Error::geometry(format!(
                "no separation below the geometric limit {limit:.4} reaches the target power"
            )));
        }
    }
    let mut lo = 0.0;
    let mut iterations = 0;
    let mut d = 0.5 * (lo + hi);
    while iterations < EXACT_MAX_ITER {
        iterations += 1;
        d = 0.5 * (lo + hi);
        let v = m(d)?;
        if (v - target).abs() <= EXACT_SEPARATION_TOL || hi - lo <= EXACT_INTERVAL_TOL {
            break;
        }
        if v < target {
            lo = d;
        } else {
            hi = d;
        }
    }
    let probs = bin_probabilities(&q.psf, &q.source(d), q.n)?;
    let power = analytic_report(&model, &probs, q.t, q.alpha)?.power;
    Ok(ResolutionResult {
        d,
        method: Method::Exact,
        diagnostics: Diagnostics { iterations, power: Some(power), converged: true, notes, ..Default::default() },
    })
}

/// Knobs of the Monte-Carlo bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub reps: usize,
    pub max_iterations: usize,
    /// Initial upper end of the bracket; the psf FWHM when `None`.
    pub start: Option<f64>,
    /// Largest separation the bracket may grow to; by default the one that
    /// keeps both sources inside (0.05, 0.95).
    pub max_d: Option<f64>,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions { reps: 10_000, max_iterations: 60, start: None, max_d: None }
    }
}

impl McOptions {
    pub fn with_reps(reps: usize) -> Self {
        McOptions { reps, ..Default::default() }
    }
}

const BRACKET_GROWTH: f64 = 1.5;
const BAND_LOW: f64 = 0.95;
const BAND_HIGH: f64 = 1.05;

struct McProbe<'a> {
    query: &'a ResolutionQuery,
    reps: usize,
    state: RngState,
}

impl McProbe<'_> {
    /// Simulated type II error at `d`; the stream is keyed by the step.
    fn beta_hat(&self, d: f64, phase: u64, step: u64) -> Result<(f64, f64, f64)> {
        let q = self.query;
        let probs = bin_probabilities(&q.psf, &q.source(d), q.n)?;
        let threshold = analytic_report(&q.model, &probs, q.t, q.alpha)?.threshold;
        let setup = LrtSetup::new(&q.model, &probs, q.t)?;
        let (power, se) = mc_power(&setup, threshold, self.reps, &self.state.derive(&[phase, step]))?;
        Ok((1.0 - power, se, power))
    }
}

/// Monte-Carlo bisection on `d` until the simulated type II error falls in
/// `[0.95β, 1.05β)`.
pub fn mc_resolution(q: &ResolutionQuery, opts: &McOptions, state: &RngState) -> Result<ResolutionResult> {
    q.validate()?;
    if opts.reps < 1000 {
        return Err(Error::param(format!("Monte-Carlo resolution needs reps >= 1000, got {}", opts.reps)));
    }
    let probe = McProbe { query: q, reps: opts.reps, state: *state };
    let (band_lo, band_hi) = (BAND_LOW * q.beta, BAND_HIGH * q.beta);
    let in_band = |b: f64| b >= band_lo && b < band_hi;
    let max_d = opts.max_d.unwrap_or_else(|| q.geometric_limit(0.05)).max(0.0);
    let mut hi = opts.start.unwrap_or_else(|| q.psf.fwhm()).min(max_d);
    let mut iterations = 0;
    let done = |d: f64, b: f64, se: f64, power: f64, it: usize, converged: bool| ResolutionResult {
        d,
        method: Method::MonteCarlo,
        diagnostics: Diagnostics {
            iterations: it,
            power: Some(power),
            beta_hat: Some(b),
            mc_se: Some(se),
            reps: Some(opts.reps),
            converged,
            notes: Vec::new(),
        },
    };

    // grow the bracket until the upper end has enough power
    let mut step = 0u64;
    let (mut b, mut se, mut power) = probe.beta_hat(hi, 0, step)?;
    while b >= band_hi {
        if hi >= max_d {
            return Err(Error::NoResolution(format!(
                "type II error {b:.4} still above {band_hi:.4} at the largest admissible separation {hi:.4}"
            )));
        }
        hi = (hi * BRACKET_GROWTH).min(max_d);
        if hi <= 0.0 {
            hi = max_d;
        }
        step += 1;
        (b, se, power) = probe.beta_hat(hi, 0, step)?;
    }
    if in_band(b) {
        return Ok(done(hi, b, se, power, 0, true));
    }

    let mut lo = 0.0;
    let mut best = (hi, b, se, power);
    while iterations < opts.max_iterations {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let (b, se, power) = probe.beta_hat(mid, 1, iterations as u64)?;
        if (b - q.beta).abs() < (best.1 - q.beta).abs() {
            best = (mid, b, se, power);
        }
        if in_band(b) {
            return Ok(done(mid, b, se, power, iterations, true));
        }
        if b >= band_hi {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (d, b, se, power) = best;
    let mut r = done(d, b, se, power, iterations, false);
    r.diagnostics.notes.push(format!("bisection stopped after {iterations} steps without reaching the band"));
    Ok(r)
}

/// Finite-n asymptotic power function of the Poisson/VSG LRT:
/// `Φ(q_α + √(Σ(∫ᵢh'')²/∫ᵢ(h+γ)) · d²√t/8)`.
pub fn acuna_power(psf: &PsfModel, x0: f64, n: usize, t: f64, d: f64, alpha: f64) -> Result<f64> {
    let curv = curvature_bin_integrals(psf, x0, n)?;
    let mass = intensity_bin_integrals(psf, x0, n)?;
    if mass.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::ModelAssumption("every bin must carry positive intensity".into()));
    }
    let s: f64 = curv.iter().zip(&mass).map(|(c, m)| c * c / m).sum();
    Ok(normal_cdf(normal_quantile(alpha)? + s.sqrt() * d * d * t.sqrt() / 8.0))
}

/// Dispatch on [`Method`].
pub fn resolve(q: &ResolutionQuery, method: Method, opts: &McOptions, state: &RngState) -> Result<ResolutionResult> {
    match method {
        Method::Asymptotic => asymptotic_resolution(q),
        Method::FiniteN => finite_n_resolution(q),
        Method::Exact => exact_resolution(q),
        Method::MonteCarlo => mc_resolution(q, opts, state),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::exact_error_rates;

    fn psf() -> PsfModel {
        PsfModel::gaussian_with_fwhm(0.2).unwrap()
    }

    fn query(kind: ModelKind, n: usize, t: f64) -> ResolutionQuery {
        ResolutionQuery::new(kind, psf(), n, t, 0.1)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn poisson_asymptotic_matches_coefficient() {
        let d = asymptotic_resolution(&query(ModelKind::Poisson, 20, 20.0)).unwrap().d;
        assert!((d - 0.1531).abs() < 5e-4, "{d}");
        let coeff = d / (20f64.powf(-0.25) * 0.2);
        assert!((coeff - 1.62).abs() < 5e-3);
    }

    #[test]
    fn hg_asymptotic_matches_coefficient() {
        let d = asymptotic_resolution(&query(ModelKind::Hg, 20, 20.0)).unwrap().d;
        let coeff = d / (20f64.powf(-0.25) * 0.2f64.powf(1.25));
        assert!((coeff - 2.29).abs() < 5e-3, "{coeff}");
    }

    #[test]
    fn hg_ignores_background() {
        let a = asymptotic_resolution(&query(ModelKind::Hg, 100, 100.0)).unwrap().d;
        let mut q = query(ModelKind::Hg, 100, 100.0);
        q.psf = q.psf.with_background(5.0).unwrap();
        assert_eq!(asymptotic_resolution(&q).unwrap().d, a);
    }

    #[test]
    fn poisson_background_degrades_resolution() {
        let a = asymptotic_resolution(&query(ModelKind::Poisson, 100, 100.0)).unwrap().d;
        let mut q = query(ModelKind::Poisson, 100, 100.0);
        q.psf = q.psf.with_background(1.0).unwrap();
        assert!(asymptotic_resolution(&q).unwrap().d > a);
    }

    #[test]
    fn hg_flags_large_n() {
        let r = asymptotic_resolution(&query(ModelKind::Hg, 500, 10.0)).unwrap();
        assert_eq!(r.diagnostics.notes.len(), 1);
    }

    #[test]
    fn invalid_alpha_is_parameter_error() {
        let mut q = query(ModelKind::Hg, 20, 20.0);
        q.alpha = 0.7;
        assert!(matches!(asymptotic_resolution(&q), Err(Error::Parameter(_))));
    }

    #[test]
    fn finite_n_converges_to_asymptotic() {
        for kind in [ModelKind::Hg, ModelKind::Vsg] {
            let a = asymptotic_resolution(&query(kind, 1000, 1000.0)).unwrap().d;
            let f = finite_n_resolution(&query(kind, 1000, 1000.0)).unwrap().d;
            assert!(rel(f, a) < 5e-3, "{kind}: {f} vs {a}");
            let mut prev = f64::INFINITY;
            for n in [10, 50, 200, 1000] {
                let f = finite_n_resolution(&query(kind, n, 1000.0)).unwrap().d;
                let a = asymptotic_resolution(&query(kind, n, 1000.0)).unwrap().d;
                let gap = rel(f, a);
                assert!(gap < prev, "{kind} n={n}: gap {gap}");
                prev = gap;
            }
        }
    }

    #[test]
    fn finite_n_vsg_small_grid() {
        let d = finite_n_resolution(&query(ModelKind::Vsg, 20, 20.0)).unwrap().d;
        assert!(rel(d, 0.153) < 0.05, "{d}");
    }

    #[test]
    fn finite_n_rejects_poisson() {
        assert!(matches!(finite_n_resolution(&query(ModelKind::Poisson, 20, 20.0)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn exact_solution_has_target_power() {
        for kind in [ModelKind::Hg, ModelKind::Vsg] {
            let q = query(kind, 100, 200.0);
            let r = exact_resolution(&q).unwrap();
            let b = bin_probabilities(&q.psf, &q.source(r.d), q.n).unwrap();
            let rep = exact_error_rates(&q.model, &b, q.t, q.alpha).unwrap();
            assert!((rep.power - 0.9).abs() < 1e-9, "{kind}: {}", rep.power);
        }
    }

    #[test]
    fn exact_close_to_asymptotic_for_hg_at_scale() {
        let q = query(ModelKind::Hg, 1000, 1000.0);
        let e = exact_resolution(&q).unwrap().d;
        let a = asymptotic_resolution(&q).unwrap().d;
        assert!(rel(e, a) <= 0.05, "{e} vs {a}");
    }

    #[test]
    fn exact_shrinks_towards_coin_flip() {
        let mut prev = f64::INFINITY;
        for e in [0.3, 0.45, 0.49, 0.499] {
            let mut q = query(ModelKind::Vsg, 50, 50.0);
            q.alpha = e;
            q.beta = e;
            let d = exact_resolution(&q).unwrap().d;
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 0.03, "{prev}");
    }

    #[test]
    fn exact_poisson_uses_vsg_with_note() {
        let r = exact_resolution(&query(ModelKind::Poisson, 50, 50.0)).unwrap();
        let v = exact_resolution(&query(ModelKind::Vsg, 50, 50.0)).unwrap();
        assert_eq!(r.d, v.d);
        assert!(!r.diagnostics.notes.is_empty());
    }

    #[test]
    fn exact_without_bracket_is_geometry_error() {
        let q = query(ModelKind::Hg, 20, 1.0);
        assert!(matches!(exact_resolution(&q), Err(Error::Geometry(_))));
    }

    #[test]
    fn acuna_power_limits_and_inversion() {
        let p = psf();
        assert!((acuna_power(&p, 0.5, 30, 50.0, 0.0, 0.1).unwrap() - 0.1).abs() < 1e-12);
        assert!(acuna_power(&p, 0.5, 30, 50.0, 5.0, 0.1).unwrap() > 1.0 - 1e-12);
        let q = query(ModelKind::Vsg, 30, 50.0);
        let d = finite_n_resolution(&q).unwrap().d;
        let power = acuna_power(&p, 0.5, 30, 50.0, d, 0.1).unwrap();
        assert!((power - 0.9).abs() < 1e-6, "{power}");
    }

    #[test]
    fn mc_resolution_is_deterministic() {
        let q = query(ModelKind::Hg, 20, 20.0);
        let o = McOptions::with_reps(2000);
        let a = mc_resolution(&q, &o, &RngState::new(8)).unwrap();
        let b = mc_resolution(&q, &o, &RngState::new(8)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mc_resolution_degenerate_bracket() {
        let q = query(ModelKind::Hg, 20, 20.0);
        let o = McOptions { max_d: Some(0.0), ..McOptions::with_reps(1000) };
        assert!(matches!(mc_resolution(&q, &o, &RngState::new(1)), Err(Error::NoResolution(_))));
    }

    #[test]
    fn mc_resolution_requires_reps() {
        let q = query(ModelKind::Hg, 20, 20.0);
        assert!(mc_resolution(&q, &McOptions::with_reps(500), &RngState::new(1)).is_err());
    }
}
