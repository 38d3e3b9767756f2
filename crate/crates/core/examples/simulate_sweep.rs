//! Monte-Carlo resolution against FWHM and against illumination at
//! `t = n = 20`, with log-log slopes per model.
//!
//! cargo run --release --example simulate_sweep [reps]

use statres::analysis::{log_grid, parse_grid, simulation_sweep, SweepSpec, SweepVar};
use statres::RngState;

fn main() -> statres::Result<()> {
    let reps = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let state = RngState::new(2024);

    let mut by_fwhm = SweepSpec::small_sample(SweepVar::Fwhm, parse_grid("0.15:0.25:0.01")?);
    by_fwhm.reps = reps;
    let mut by_t = SweepSpec::small_sample(SweepVar::T, log_grid(20.0, 1.0, 9));
    by_t.reps = reps;

    for (label, spec) in [("fwhm", &by_fwhm), ("t", &by_t)] {
        println!("sweep over {label}, {reps} replications");
        for out in simulation_sweep(spec, &state)? {
            let row: Vec<String> =
                out.points.iter().map(|p| p.result.as_ref().map_or("-".into(), |r| format!("{:.4}", r.d))).collect();
            match &out.fit {
                Some(f) => println!("  {:<8} slope {:+.3}  d = [{}]", out.model, f.slope, row.join(", ")),
                None => println!("  {:<8} no fit  d = [{}]", out.model, row.join(", ")),
            }
        }
    }
    Ok(())
}
