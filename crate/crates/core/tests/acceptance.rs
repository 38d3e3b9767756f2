//! Acceptance suite. One PASS/FAIL line per criterion; exits nonzero if
//! any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use statres::analysis::{
    criterion_alpha, hardest_alternative_scan, log_grid, normality_check, parse_grid, riemann_convergence_check,
    simulation_sweep, sted_improvement, table1, weight_scan, Criterion, OffsetScanSpec, SweepSpec, SweepVar,
};
use statres::models::{exact_error_rates, mc_error_rates, ThresholdMode};
use statres::psf::{gaussian_curvature_integral, gaussian_fisher_integral};
use statres::resolution::{asymptotic_resolution, exact_resolution, mc_resolution, McOptions, ResolutionQuery};
use statres::{bin_probabilities, ModelKind, NoiseModel, PsfModel, RngState, SourceConfig};

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sig3(x: f64) -> f64 {
    let e = x.abs().log10().floor() - 2.0;
    (x / 10f64.powf(e)).round() * 10f64.powf(e)
}

fn gaussian(fwhm: f64) -> PsfModel {
    PsfModel::gaussian_with_fwhm(fwhm).unwrap()
}

fn c1_table1() -> Outcome {
    let rows = table1(&[0.01, 0.05, 0.1]).map_err(|e| e.to_string())?;
    let hg = [3.08, 2.59, 2.29];
    let pv = [2.18, 1.83, 1.62];
    let mut worst: f64 = 0.0;
    for (i, r) in rows.iter().enumerate() {
        worst = worst.max((r.hg - hg[i]).abs()).max((r.poisson_vsg - pv[i]).abs());
    }
    check(worst <= 0.005, format!("max deviation {worst:.4} (tolerance 0.005)"))
}

fn c2_table2() -> Outcome {
    let abbe = [6.81, 1.76, 0.494, 0.144, 0.0432];
    let rayleigh = [1.33, 0.0857, 0.00614, 4.61e-4, 3.56e-5];
    let mut bad = Vec::new();
    for (i, t) in [10.0, 20.0, 30.0, 40.0, 50.0].into_iter().enumerate() {
        for (crit, want) in [(Criterion::Abbe, abbe[i]), (Criterion::Rayleigh, rayleigh[i])] {
            let got = 100.0 * criterion_alpha(crit, t).map_err(|e| e.to_string())?;
            if (sig3(got) - want).abs() > 1e-9 * want {
                bad.push(format!("{} t={t}: {got:.4e}% vs {want}%", crit.name()));
            }
        }
    }
    check(bad.is_empty(), if bad.is_empty() { "10/10 entries match to 3 figures".into() } else { bad.join("; ") })
}

fn c3_sted() -> Outcome {
    let g = sted_improvement(6.0).map_err(|e| e.to_string())?;
    let err = (g - 6f64.powf(0.75)).abs();
    check(err <= 1e-12 && (g - 3.834).abs() < 5e-4, format!("gain {g:.12}"))
}

fn c4_slopes() -> Outcome {
    let state = RngState::new(42);
    let fwhm_spec = SweepSpec::small_sample(SweepVar::Fwhm, parse_grid("0.15:0.25:0.01").unwrap());
    let t_spec = SweepSpec::small_sample(SweepVar::T, log_grid(20.0, 1.0, 9));
    let want = [
        (SweepVar::Fwhm, ModelKind::Hg, 1.26),
        (SweepVar::Fwhm, ModelKind::Poisson, 0.979),
        (SweepVar::Fwhm, ModelKind::Vsg, 0.975),
        (SweepVar::T, ModelKind::Hg, -0.665),
        (SweepVar::T, ModelKind::Poisson, -0.352),
        (SweepVar::T, ModelKind::Vsg, -0.336),
    ];
    let by_fwhm = simulation_sweep(&fwhm_spec, &state).map_err(|e| e.to_string())?;
    let by_t = simulation_sweep(&t_spec, &state).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (var, model, target) in want {
        let outs = if var == SweepVar::Fwhm { &by_fwhm } else { &by_t };
        let slope = outs.iter().find(|o| o.model == model).and_then(|o| o.fit.as_ref()).map(|f| f.slope);
        match slope {
            Some(s) => {
                ok &= (s - target).abs() <= 0.1;
                parts.push(format!("{model} d({var}) {s:+.3} vs {target:+.3}"));
            }
            None => {
                ok = false;
                parts.push(format!("{model} d({var}) no fit"));
            }
        }
    }
    check(ok, parts.join(", "))
}

fn c5_large_sample() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, kind) in ModelKind::ALL.into_iter().enumerate() {
        let q = ResolutionQuery::new(kind, gaussian(0.2), 1000, 1000.0, 0.1);
        let asy = asymptotic_resolution(&q).map_err(|e| e.to_string())?.d;
        let mc = mc_resolution(&q, &McOptions::default(), &RngState::new(7).substream(i as u64))
            .map_err(|e| e.to_string())?
            .d;
        let ratio = mc / asy;
        ok &= (0.9..=1.1).contains(&ratio);
        parts.push(format!("{kind} {ratio:.3}"));
    }
    check(ok, format!("mc/asymptotic: {}", parts.join(", ")))
}

fn c6_gaussian_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let reps = 100_000;
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for s in 0..5u64 {
        let fwhm = rng.gen_range(0.1..0.3);
        let t = rng.gen_range(10.0..200.0f64).round();
        let n = rng.gen_range(10..200usize);
        let d = rng.gen_range(0.1..0.5) * fwhm;
        let alpha = rng.gen_range(0.02..0.2);
        let probs =
            bin_probabilities(&gaussian(fwhm), &SourceConfig::symmetric(0.5, d), n).map_err(|e| e.to_string())?;
        for (k, kind) in [ModelKind::Hg, ModelKind::Vsg].into_iter().enumerate() {
            let model = NoiseModel::new(kind);
            let exact = exact_error_rates(&model, &probs, t, alpha).map_err(|e| e.to_string())?;
            let state = RngState::new(600).derive(&[s, k as u64]);
            let mc = mc_error_rates(&model, &probs, t, ThresholdMode::Analytic, alpha, reps, &state)
                .map_err(|e| e.to_string())?;
            for (got, want) in [(mc.level, exact.level), (mc.power, exact.power)] {
                let se = common::binomial_se(want, reps);
                let z = if se > 0.0 {
                    (got - want).abs() / se
                } else if got == want {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst = worst.max(z);
                ok &= z <= 3.0;
            }
        }
    }
    check(ok, format!("10 model/scenario pairs, largest deviation {worst:.2} SE (bound 3)"))
}

fn c7_clt() -> Outcome {
    let psf = gaussian(0.2);
    let probs = bin_probabilities(&psf, &SourceConfig::symmetric(0.5, 0.1), 1000).map_err(|e| e.to_string())?;
    let rep = normality_check(&NoiseModel::new(ModelKind::Poisson), &probs, 100.0, 10_000, &RngState::new(77))
        .map_err(|e| e.to_string())?;
    check(
        rep.ks_null <= 0.03 && rep.ks_alternative <= 0.03,
        format!("KS H0 {:.4}, H1 {:.4} (bound 0.03)", rep.ks_null, rep.ks_alternative),
    )
}

fn c8_invariances() -> Outcome {
    let e = |e: statres::Error| e.to_string();
    let mut fails = Vec::new();

    // background does not enter the HG resolution
    let base = ResolutionQuery::new(ModelKind::Hg, gaussian(0.2), 20, 20.0, 0.1);
    let mut noisy = base;
    noisy.psf = base.psf.with_background(5.0).map_err(e)?;
    let (a, b) = (asymptotic_resolution(&base).map_err(e)?.d, asymptotic_resolution(&noisy).map_err(e)?.d);
    if (a - b).abs() > 1e-12 * a {
        fails.push(format!("HG gamma: {a} vs {b}"));
    }

    // thinning acts as a shorter illumination
    for kind in [ModelKind::Poisson, ModelKind::Vsg] {
        let mut thin = ResolutionQuery::new(kind, gaussian(0.2), 20, 50.0, 0.1);
        thin.model = thin.model.with_thinning(0.4).map_err(e)?;
        let short = ResolutionQuery::new(kind, gaussian(0.2), 20, 20.0, 0.1);
        let (a, b) = (asymptotic_resolution(&thin).map_err(e)?.d, asymptotic_resolution(&short).map_err(e)?.d);
        if (a - b).abs() > 1e-12 * a {
            fails.push(format!("{kind} thinning asymptotic: {a} vs {b}"));
        }
        if kind == ModelKind::Vsg {
            let (a, b) = (exact_resolution(&thin).map_err(e)?.d, exact_resolution(&short).map_err(e)?.d);
            if (a - b).abs() > 1e-9 * a {
                fails.push(format!("VSG thinning exact: {a} vs {b}"));
            }
        }
    }

    // the symmetric placement is the hardest alternative
    let lambdas = parse_grid("-0.05:0.05:0.01").unwrap();
    for kind in ModelKind::ALL {
        let spec = OffsetScanSpec {
            model: NoiseModel::new(kind),
            psf: gaussian(0.2),
            x0: 0.5,
            d: 0.1,
            t: 20.0,
            n: 20,
            alpha: 0.1,
        };
        let scan = hardest_alternative_scan(&spec, &lambdas).map_err(e)?;
        if scan.argmin.abs() > 1e-12 {
            fails.push(format!("{kind} offset argmin {}", scan.argmin));
        }
    }

    // unequal weights: minimum at q = 1/2 and the ratio law
    let qs = parse_grid("0.1:0.9:0.05").unwrap();
    for kind in ModelKind::ALL {
        let pts = weight_scan(&ResolutionQuery::new(kind, gaussian(0.2), 20, 20.0, 0.1), &qs).map_err(e)?;
        let argmin = pts.iter().min_by(|a, b| a.d.total_cmp(&b.d)).unwrap().q;
        if (argmin - 0.5).abs() > 1e-12 {
            fails.push(format!("{kind} weight argmin {argmin}"));
        }
        for p in &pts {
            let law = 1.0 / (2.0 * (p.q * (1.0 - p.q)).sqrt());
            if (p.ratio - law).abs() > 1e-12 * law {
                fails.push(format!("{kind} q={} ratio {} vs {law}", p.q, p.ratio));
            }
        }
    }

    // binned curvature sum converges to its integral
    let psf = gaussian(0.2);
    let rows = riemann_convergence_check(
        |x| psf.second_derivative(x - 0.5),
        |x| psf.eval(x - 0.5),
        psf.scale(),
        &[20, 200, 2000],
    )
    .map_err(e)?;
    if !rows.windows(2).all(|w| w[1].gap < w[0].gap) {
        let gaps: Vec<String> = rows.iter().map(|r| format!("{:.3e}", r.gap)).collect();
        fails.push(format!("riemann gaps not decreasing: {}", gaps.join(", ")));
    }

    check(fails.is_empty(), if fails.is_empty() { "all invariances hold".into() } else { fails.join("; ") })
}

fn c9_integral_oracles() -> Outcome {
    let mut worst: f64 = 0.0;
    for sigma in [0.02, 0.05, 0.1, 0.2, 0.3] {
        let c = gaussian_curvature_integral(sigma, 0.5).map_err(|e| e.to_string())?;
        let f = gaussian_fisher_integral(sigma, 0.5, 0.0).map_err(|e| e.to_string())?;
        let co = common::curvature_oracle(sigma);
        let fo = common::fisher_oracle(sigma);
        worst = worst.max(((c - co) / co).abs()).max(((f - fo) / fo).abs());
    }
    check(worst <= 1e-8, format!("largest relative gap {worst:.2e} (bound 1e-8)"))
}

fn main() -> ExitCode {
    let criteria: [Check; 9] = [
        ("Table 1 coefficients", c1_table1),
        ("Table 2 levels", c2_table2),
        ("STED improvement", c3_sted),
        ("Monte-Carlo scaling slopes", c4_slopes),
        ("large-sample convergence", c5_large_sample),
        ("exact Gaussian tests", c6_gaussian_exactness),
        ("Poisson CLT", c7_clt),
        ("invariance suite", c8_invariances),
        ("closed-form integral oracles", c9_integral_oracles),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {}: {tag}: {name}: {detail} [{secs:.1}s]", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
