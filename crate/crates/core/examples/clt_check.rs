//! Normality of the standardized Poisson LRT statistic, and convergence of
//! the binned curvature sum to its integral as bins shrink.
//!
//! cargo run --release --example clt_check

use statres::analysis::{normality_check, riemann_convergence_check};
use statres::{bin_probabilities, ModelKind, NoiseModel, PsfModel, RngState, SourceConfig};

fn main() -> statres::Result<()> {
    let psf = PsfModel::gaussian_with_fwhm(0.2)?;
    for (t, n) in [(10.0, 20), (100.0, 200), (100.0, 1000)] {
        let probs = bin_probabilities(&psf, &SourceConfig::symmetric(0.5, 0.1), n)?;
        let r = normality_check(&NoiseModel::new(ModelKind::Poisson), &probs, t, 10_000, &RngState::new(3))?;
        println!("t = {t:<5} n = {n:<5} KS under H0 {:.4}, under H1 {:.4}", r.ks_null, r.ks_alternative);
    }

    let bg = psf.with_background(0.1)?;
    let rows = riemann_convergence_check(
        |x| bg.second_derivative(x - 0.5),
        |x| bg.eval(x - 0.5),
        bg.scale(),
        &[10, 20, 50, 200, 2000],
    )?;
    println!("\n    n  sum/integral - 1");
    for r in rows {
        println!("{:>5}  {:+.3e}", r.n, r.sum / r.integral - 1.0);
    }
    Ok(())
}
