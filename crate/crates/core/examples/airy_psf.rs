//! Airy psf against a Gaussian of the same FWHM. The Airy pattern has
//! zeros, so the Poisson and VSG models need a background to keep every
//! bin positive.
//!
//! cargo run --release --example airy_psf

use statres::resolution::{asymptotic_resolution, exact_resolution, ResolutionQuery};
use statres::{ModelKind, PsfModel};

fn main() -> statres::Result<()> {
    let fwhm = 0.2;
    let airy = PsfModel::airy(fwhm)?;
    println!("Airy numeric FWHM {:.12} (configured {fwhm})", airy.numeric_fwhm());
    println!("Airy mass on [0,1] for a centred source {:.5}", airy.mass_on_unit_interval(0.5));
    println!("\n gamma  model    airy asympt  airy exact  gauss asympt");
    for gamma in [0.05, 0.5] {
        for kind in ModelKind::ALL {
            let mk = |psf: PsfModel| -> statres::Result<ResolutionQuery> {
                Ok(ResolutionQuery::new(kind, psf.with_background(gamma)?, 100, 100.0, 0.1))
            };
            let qa = mk(airy)?;
            let qg = mk(PsfModel::gaussian_with_fwhm(fwhm)?)?;
            let exact = exact_resolution(&qa).map(|r| format!("{:.5}", r.d)).unwrap_or_else(|_| "-".into());
            println!(
                "{gamma:>6}  {:<8} {:>11.5}  {exact:>10}  {:>12.5}",
                kind.name(),
                asymptotic_resolution(&qa)?.d,
                asymptotic_resolution(&qg)?.d
            );
        }
    }
    Ok(())
}
