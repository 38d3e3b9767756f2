//! Monte-Carlo level and power of the LRT.
//!
//! Replications are split into fixed chunks of [`CHUNK`]; chunk `c` draws
//! from substream `c` of its batch state. Rejection counts are integers, so
//! the result does not depend on how chunks are scheduled.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::RngState;
use super::{analytic_report, Hypothesis, LrtSetup, NoiseModel, TestReport};
use crate::binning::BinProbabilities;
use crate::error::{Error, Result};

pub const CHUNK: usize = 1000;

/// Substream tags for the batches of one Monte-Carlo evaluation.
const CALIBRATION: u64 = 0;
const LEVEL: u64 = 1;
const POWER: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    /// Closed-form threshold for HG/VSG, CLT threshold for Poisson.
    Analytic,
    /// Empirical (1−α)-quantile of simulated H0 statistics.
    H0Calibrated,
}

fn chunks(reps: usize) -> Vec<(u64, usize)> {
    (0..reps.div_ceil(CHUNK)).map(|c| (c as u64, CHUNK.min(reps - c * CHUNK))).collect()
}

/// Number of replications under `hyp` whose statistic exceeds `threshold`.
pub fn count_exceedances(setup: &LrtSetup, hyp: Hypothesis, threshold: f64, reps: usize, state: &RngState) -> usize {
    chunks(reps)
        .into_par_iter()
        .map(|(c, len)| {
            let mut rng = state.substream(c).generator();
            (0..len).filter(|_| setup.draw_statistic(hyp, &mut rng) > threshold).count()
        })
        .sum()
}

/// Simulated LRT statistics in replication order.
pub fn simulate_statistics(setup: &LrtSetup, hyp: Hypothesis, reps: usize, state: &RngState) -> Vec<f64> {
    let parts: Vec<Vec<f64>> = chunks(reps)
        .into_par_iter()
        .map(|(c, len)| {
            let mut rng = state.substream(c).generator();
            (0..len).map(|_| setup.draw_statistic(hyp, &mut rng)).collect()
        })
        .collect();
    parts.concat()
}

fn binomial_se(p: f64, reps: usize) -> f64 {
    (p * (1.0 - p) / reps as f64).sqrt()
}

fn check_reps(reps: usize) -> Result<()> {
    if reps < 100 {
        return Err(Error::param(format!("Monte-Carlo needs at least 100 replications, got {reps}")));
    }
    Ok(())
}

/// Power of the test with a fixed threshold, estimated from `reps` draws
/// under H1. Returns `(power, standard error)`.
pub fn mc_power(setup: &LrtSetup, threshold: f64, reps: usize, state: &RngState) -> Result<(f64, f64)> {
    check_reps(reps)?;
    let k = count_exceedances(setup, Hypothesis::Alternative, threshold, reps, &state.substream(POWER));
    let p = k as f64 / reps as f64;
    Ok((p, binomial_se(p, reps)))
}

/// Simulated level and power.
pub fn mc_error_rates(
    model: &NoiseModel,
    probs: &BinProbabilities,
    t: f64,
    mode: ThresholdMode,
    alpha: f64,
    reps: usize,
    state: &RngState,
) -> Result<TestReport> {
    check_reps(reps)?;
    let setup = LrtSetup::new(model, probs, t)?;
    let threshold = match mode {
        ThresholdMode::Analytic => analytic_report(model, probs, t, alpha)?.threshold,
        ThresholdMode::H0Calibrated => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::param(format!("alpha must lie in (0,1), got {alpha}")));
            }
            let mut calib = simulate_statistics(&setup, Hypothesis::Null, reps, &state.substream(CALIBRATION));
            calib.sort_by(f64::total_cmp);
            let k = ((1.0 - alpha) * reps as f64).ceil() as usize;
            calib[k.clamp(1, reps) - 1]
        }
    };
    let rejected = count_exceedances(&setup, Hypothesis::Null, threshold, reps, &state.substream(LEVEL));
    let level = rejected as f64 / reps as f64;
    let (power, mc_se) = mc_power(&setup, threshold, reps, state)?;
    Ok(TestReport { threshold, level, power, mc_se, level_se: binomial_se(level, reps), reps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binning::{bin_probabilities, SourceConfig};
    use crate::models::{exact_error_rates, ModelKind};
    use crate::psf::PsfModel;

    fn probs(d: f64, n: usize) -> BinProbabilities {
        let psf = PsfModel::gaussian_with_fwhm(0.2).unwrap();
        bin_probabilities(&psf, &SourceConfig::symmetric(0.5, d), n).unwrap()
    }

    #[test]
    fn chunking_covers_all_reps() {
        let c = chunks(2500);
        assert_eq!(c.len(), 3);
        assert_eq!(c.iter().map(|x| x.1).sum::<usize>(), 2500);
    }

    #[test]
    fn independent_of_thread_count() {
        let b = probs(0.1, 20);
        let m = NoiseModel::new(ModelKind::Poisson);
        let s = RngState::new(77);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mc_error_rates(&m, &b, 50.0, ThresholdMode::Analytic, 0.1, 5_000, &s).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn hg_analytic_level_is_exact() {
        let b = probs(0.12, 20);
        let m = NoiseModel::new(ModelKind::Hg);
        let r = mc_error_rates(&m, &b, 20.0, ThresholdMode::Analytic, 0.1, 100_000, &RngState::new(3)).unwrap();
        assert!((r.level - 0.1).abs() <= 3.0 * r.level_se, "{r:?}");
    }

    #[test]
    fn vsg_power_matches_closed_form() {
        let b = probs(0.15, 20);
        let m = NoiseModel::new(ModelKind::Vsg);
        let exact = exact_error_rates(&m, &b, 20.0, 0.1).unwrap();
        let r = mc_error_rates(&m, &b, 20.0, ThresholdMode::Analytic, 0.1, 100_000, &RngState::new(4)).unwrap();
        assert!((r.power - exact.power).abs() <= 3.0 * r.mc_se, "{} vs {}", r.power, exact.power);
    }

    #[test]
    fn poisson_calibrated_level_on_held_out_batch() {
        let b = probs(0.1, 40);
        let m = NoiseModel::new(ModelKind::Poisson);
        let r = mc_error_rates(&m, &b, 200.0, ThresholdMode::H0Calibrated, 0.1, 100_000, &RngState::new(5)).unwrap();
        assert!((r.level - 0.1).abs() <= 3.0 * r.level_se, "{r:?}");
    }

    #[test]
    fn too_few_reps_rejected() {
        let b = probs(0.1, 20);
        let m = NoiseModel::new(ModelKind::Hg);
        assert!(mc_error_rates(&m, &b, 20.0, ThresholdMode::Analytic, 0.1, 50, &RngState::new(1)).is_err());
    }
}
