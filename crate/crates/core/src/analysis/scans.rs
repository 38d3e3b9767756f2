//! Empirical scans over the alternative's geometry: offset of the
//! intensity centre and unequal source weights.

use serde::{Deserialize, Serialize};

use crate::binning::{bin_probabilities, SourceConfig};
use crate::error::{Error, Result};
use crate::models::{analytic_report, gaussian_separation, ModelKind, NoiseModel};
use crate::psf::PsfModel;
use crate::resolution::{asymptotic_resolution, ResolutionQuery};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffsetPoint {
    pub lambda: f64,
    /// Analytic power; `None` when the geometry left the unit interval.
    pub power: Option<f64>,
    /// `μₙ` (HG) or `νₙ` (VSG); `None` for Poisson and skipped points.
    pub separation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffsetScan {
    pub points: Vec<OffsetPoint>,
    /// Offset with the smallest power among evaluated points.
    pub argmin: f64,
}

/// Parameters shared by every point of an offset scan.
#[derive(Debug, Clone, Copy)]
pub struct OffsetScanSpec {
    pub model: NoiseModel,
    pub psf: PsfModel,
    pub x0: f64,
    pub d: f64,
    pub t: f64,
    pub n: usize,
    pub alpha: f64,
}

/// Analytic power of the LRT as the two-source centre moves away from `x0`
/// by each `λ` of a grid that is symmetric about zero.
pub fn hardest_alternative_scan(spec: &OffsetScanSpec, lambdas: &[f64]) -> Result<OffsetScan> {
    for &l in lambdas {
        if !lambdas.iter().any(|&m| (m + l).abs() <= 1e-12) {
            return Err(Error::param(format!("offset grid must be symmetric about 0; {l} has no mirror")));
        }
    }
    let mut points = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let src = SourceConfig::symmetric(spec.x0, spec.d).with_offset(lambda);
        let probs = match bin_probabilities(&spec.psf, &src, spec.n) {
            Ok(p) => p,
            Err(Error::Geometry(msg)) => {
                log::warn!("offset {lambda} skipped: {msg}");
                points.push(OffsetPoint { lambda, power: None, separation: None });
                continue;
            }
            Err(e) => return Err(e),
        };
        let power = analytic_report(&spec.model, &probs, spec.t, spec.alpha)?.power;
        let separation = match spec.model.kind {
            ModelKind::Poisson => None,
            _ => Some(gaussian_separation(&spec.model, &probs, spec.t)?),
        };
        points.push(OffsetPoint { lambda, power: Some(power), separation });
    }
    let argmin = points
        .iter()
        .filter_map(|p| p.power.map(|v| (p.lambda, v)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(l, _)| l)
        .ok_or_else(|| Error::geometry("every offset left the unit interval"))?;
    Ok(OffsetScan { points, argmin })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightPoint {
    pub q: f64,
    pub d: f64,
    /// `d(q)/d(1/2)`.
    pub ratio: f64,
}

/// Asymptotic resolution as a function of the weight `q` of the first
/// source; all other query fields are taken from `base`.
pub fn weight_scan(base: &ResolutionQuery, qs: &[f64]) -> Result<Vec<WeightPoint>> {
    let mut half = *base;
    half.weight_q = 0.5;
    let d_half = asymptotic_resolution(&half)?.d;
    qs.iter()
        .map(|&q| {
            let mut query = *base;
            query.weight_q = q;
            let d = asymptotic_resolution(&query)?.d;
            Ok(WeightPoint { q, d, ratio: d / d_half })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: ModelKind) -> OffsetScanSpec {
        OffsetScanSpec {
            model: NoiseModel::new(kind),
            psf: PsfModel::gaussian_with_fwhm(0.2).unwrap(),
            x0: 0.5,
            d: 0.1,
            t: 100.0,
            n: 50,
            alpha: 0.1,
        }
    }

    fn grid() -> Vec<f64> {
        (-5..=5).map(|i| i as f64 * 0.01).collect()
    }

    #[test]
    fn symmetric_placement_is_hardest() {
        for kind in ModelKind::ALL {
            let scan = hardest_alternative_scan(&spec(kind), &grid()).unwrap();
            assert!(scan.argmin.abs() <= 0.01 + 1e-12, "{kind}: {}", scan.argmin);
            let p0 = scan.points[5].power.unwrap();
            for p in &scan.points {
                assert!(p.power.unwrap() >= p0 - 1e-12);
            }
        }
    }

    #[test]
    fn separation_even_in_offset() {
        let scan = hardest_alternative_scan(&spec(ModelKind::Hg), &grid()).unwrap();
        for i in 0..5 {
            let a = scan.points[i].separation.unwrap();
            let b = scan.points[10 - i].separation.unwrap();
            assert!((a - b).abs() <= 1e-10 * a.max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn asymmetric_grid_rejected() {
        assert!(hardest_alternative_scan(&spec(ModelKind::Hg), &[0.0, 0.01]).is_err());
    }

    #[test]
    fn out_of_range_offsets_are_skipped() {
        let mut s = spec(ModelKind::Vsg);
        s.x0 = 0.1;
        let scan = hardest_alternative_scan(&s, &[-0.08, 0.0, 0.08]).unwrap();
        assert!(scan.points[2].power.is_none());
        assert!(scan.points[1].power.is_some());
    }

    #[test]
    fn weight_ratio_law() {
        let base =
            ResolutionQuery::new(ModelKind::Poisson, PsfModel::gaussian_with_fwhm(0.2).unwrap(), 100, 100.0, 0.1);
        let pts = weight_scan(&base, &[0.1, 0.25, 0.5, 0.75, 0.9]).unwrap();
        assert!((pts[1].ratio - 1.0 / (2.0 * 0.1875f64.sqrt())).abs() < 1e-12);
        assert!((pts[1].d - pts[3].d).abs() <= 1e-15 * pts[1].d);
        assert!((pts[2].ratio - 1.0).abs() < 1e-15);
        let min = pts.iter().min_by(|a, b| a.d.total_cmp(&b.d)).unwrap();
        assert_eq!(min.q, 0.5);
        let tiny = weight_scan(&base, &[1e-6]).unwrap()[0];
        assert!(tiny.ratio > 400.0);
    }
}
