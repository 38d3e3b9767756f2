//! Resolution of a Gaussian psf (FWHM 0.2) by every solver, for a short
//! and a long illumination.
//!
//! cargo run --release --example resolve_gaussian

use statres::resolution::{resolve, McOptions, Method, ResolutionQuery};
use statres::{ModelKind, PsfModel, RngState};

fn main() -> statres::Result<()> {
    let psf = PsfModel::gaussian_with_fwhm(0.2)?;
    let methods = [Method::Asymptotic, Method::FiniteN, Method::Exact, Method::MonteCarlo];
    for tn in [20usize, 1000] {
        println!("t = n = {tn}, alpha = beta = 0.1");
        println!("  {:<8} {:>11} {:>11} {:>11} {:>11}", "model", "asymptotic", "finite-n", "exact", "mc");
        for kind in ModelKind::ALL {
            let q = ResolutionQuery::new(kind, psf, tn, tn as f64, 0.1);
            let cells: Vec<String> = methods
                .iter()
                .map(|&m| match resolve(&q, m, &McOptions::default(), &RngState::new(1)) {
                    Ok(r) => format!("{:>11.5}", r.d),
                    Err(_) => format!("{:>11}", "-"),
                })
                .collect();
            println!("  {:<8} {}", kind.name(), cells.join(" "));
        }
    }
    println!("(the Poisson exact column is the VSG solution; finite-n has no Poisson form)");
    Ok(())
}
