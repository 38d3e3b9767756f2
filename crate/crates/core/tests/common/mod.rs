//! Test-only oracles, written independently of the library numerics.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Adaptive Simpson with Richardson correction.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Simpson over `panels` equal pieces of [a, b], each to `tol / panels`.
pub fn simpson_panels<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize, tol: f64) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels).map(|i| simpson(f, a + i as f64 * h, a + (i + 1) as f64 * h, tol / panels as f64)).sum()
}

pub fn gauss(u: f64, sigma: f64) -> f64 {
    (-0.5 * (u / sigma).powi(2)).exp() / ((2.0 * PI).sqrt() * sigma)
}

pub fn gauss_dd(u: f64, sigma: f64) -> f64 {
    gauss(u, sigma) * (u * u / sigma.powi(4) - 1.0 / (sigma * sigma))
}

/// `∫₀¹ h''(x − 1/2)²` for the Gaussian kernel.
pub fn curvature_oracle(sigma: f64) -> f64 {
    let f = |u: f64| gauss_dd(u, sigma).powi(2);
    let scale = f(0.0);
    simpson_panels(&f, -0.5, 0.5, 200, 1e-15 * scale)
}

/// `∫₀¹ h''(x − 1/2)² / h(x − 1/2)` for the Gaussian kernel.
pub fn fisher_oracle(sigma: f64) -> f64 {
    let f = |u: f64| {
        let r = u * u / sigma.powi(4) - 1.0 / (sigma * sigma);
        gauss(u, sigma) * r * r
    };
    let scale = f(0.0);
    simpson_panels(&f, -0.5, 0.5, 200, 1e-15 * scale)
}

/// Binomial standard error.
pub fn binomial_se(p: f64, reps: usize) -> f64 {
    (p * (1.0 - p) / reps as f64).sqrt()
}
