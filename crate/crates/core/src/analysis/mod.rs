//! Reproduction of the coefficient tables, parameter sweeps and empirical
//! checks built on the resolution solvers.

pub mod checks;
pub mod scans;
pub mod sweep;
pub mod tables;

pub use checks::{ks_normal, normality_check, riemann_convergence_check, NormalityReport, RiemannRow};
pub use scans::{hardest_alternative_scan, weight_scan, OffsetScan, OffsetScanSpec, WeightPoint};
pub use sweep::{log_grid, loglog_fit, parse_grid, simulation_sweep, FitResult, SweepOutcome, SweepSpec, SweepVar};
pub use tables::{criterion_alpha, sted_improvement, table1, Criterion, Table1Row};
