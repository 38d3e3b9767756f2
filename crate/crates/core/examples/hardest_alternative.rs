//! The symmetric placement of two sources around the single source is the
//! hardest to detect; unequal weights make detection easier by
//! 1/(2√(q(1−q))).
//!
//! cargo run --example hardest_alternative

use statres::analysis::{hardest_alternative_scan, parse_grid, weight_scan, OffsetScanSpec};
use statres::resolution::ResolutionQuery;
use statres::{ModelKind, NoiseModel, PsfModel};

fn main() -> statres::Result<()> {
    let psf = PsfModel::gaussian_with_fwhm(0.2)?;
    let lambdas = parse_grid("-0.04:0.04:0.01")?;
    for kind in ModelKind::ALL {
        let spec = OffsetScanSpec { model: NoiseModel::new(kind), psf, x0: 0.5, d: 0.1, t: 20.0, n: 20, alpha: 0.1 };
        let scan = hardest_alternative_scan(&spec, &lambdas)?;
        let powers: Vec<String> = scan.points.iter().map(|p| format!("{:.3}", p.power.unwrap_or(f64::NAN))).collect();
        println!("{:<8} power over offset: [{}], least at {}", kind.name(), powers.join(" "), scan.argmin);
    }

    let base = ResolutionQuery::new(ModelKind::Poisson, psf, 20, 20.0, 0.1);
    println!("\n  q     d(q)     d(q)/d(1/2)  1/(2√(q(1−q)))");
    for p in weight_scan(&base, &parse_grid("0.1:0.9:0.2")?)? {
        println!("{:>4}  {:.5}  {:>11.6}  {:>14.6}", p.q, p.d, p.ratio, 1.0 / (2.0 * (p.q * (1.0 - p.q)).sqrt()));
    }
    Ok(())
}
