//! STED narrowing: shrinking the FWHM by `√(1+ξ)`. At a fixed photon budget
//! the Poisson resolution improves linearly with the shrink factor; when the
//! depletion also cuts the detected photons by that factor the gain drops to
//! `ratio^{3/4}`.
//!
//! cargo run --example sted

use statres::analysis::sted_improvement;
use statres::psf::sted_narrow;
use statres::resolution::{asymptotic_resolution, ResolutionQuery};
use statres::{ModelKind, PsfModel};

fn main() -> statres::Result<()> {
    let confocal = 0.3;
    let t = 1000.0;
    let base = asymptotic_resolution(&ResolutionQuery::new(
        ModelKind::Poisson,
        PsfModel::gaussian_with_fwhm(confocal)?,
        100,
        t,
        0.05,
    ))?
    .d;
    println!("  xi   FWHM    gain at equal t   gain with t/ratio   ratio^(3/4)");
    for xi in [0.0, 3.0, 8.0, 15.0, 35.0] {
        let fwhm = sted_narrow(confocal, xi)?;
        let ratio = confocal / fwhm;
        let psf = PsfModel::gaussian_with_fwhm(fwhm)?;
        let same_t = asymptotic_resolution(&ResolutionQuery::new(ModelKind::Poisson, psf, 100, t, 0.05))?.d;
        let fewer = asymptotic_resolution(&ResolutionQuery::new(ModelKind::Poisson, psf, 100, t / ratio, 0.05))?.d;
        println!(
            "{xi:>4}  {fwhm:.4}  {:>15.3}  {:>17.3}  {:>12.3}",
            base / same_t,
            base / fewer,
            sted_improvement(ratio)?
        );
    }
    Ok(())
}
