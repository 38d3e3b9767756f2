//! Resolution coefficients, the error levels matching the Abbe and
//! Rayleigh distances, and the STED gain.
//!
//! cargo run --example tables

use statres::analysis::{criterion_alpha, sted_improvement, table1, Criterion};

fn main() -> statres::Result<()> {
    println!("alpha   HG coeff  P/VSG coeff");
    for row in table1(&[0.01, 0.05, 0.1])? {
        println!("{:<6}  {:>8.4}  {:>11.4}", row.alpha, row.hg, row.poisson_vsg);
    }

    println!("\n t   Abbe alpha   Rayleigh alpha");
    for t in [10.0, 20.0, 30.0, 40.0, 50.0] {
        println!(
            "{t:>2}   {:>10.3e}   {:>14.3e}",
            criterion_alpha(Criterion::Abbe, t)?,
            criterion_alpha(Criterion::Rayleigh, t)?
        );
    }

    for ratio in [2.0, 4.0, 6.0, 10.0] {
        println!("FWHM / {ratio:<4} -> resolution gain {:.3}", sted_improvement(ratio)?);
    }
    Ok(())
}
