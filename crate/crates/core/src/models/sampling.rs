//! Poisson and normal variates from a [`StreamRng`].

use super::normal::quantile_unpolished;
use super::rng::StreamRng;

/// Mean at which Poisson sampling switches from inversion to
/// transformed rejection.
pub const INVERSION_LIMIT: f64 = 30.0;

/// Normal variate by inversion of the CDF.
#[inline]
pub fn normal(rng: &mut StreamRng, mean: f64) -> f64 {
    mean + quantile_unpolished(rng.uniform())
}

/// Poisson variate: sequential-search inversion below
/// [`INVERSION_LIMIT`], Hörmann's PTRS above.
pub fn poisson(rng: &mut StreamRng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    if mean < INVERSION_LIMIT {
        poisson_inversion(rng, mean)
    } else {
        poisson_ptrs(rng, mean)
    }
}

fn poisson_inversion(rng: &mut StreamRng, mean: f64) -> u64 {
    let u = rng.uniform();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= mean / k as f64;
        let next = cdf + p;
        if next == cdf {
            // exhausted double precision in the far tail
            break;
        }
        cdf = next;
    }
    k
}

// W. Hörmann, "The transformed rejection method for generating Poisson
// random variables", Insurance: Mathematics and Economics 12 (1993).
fn poisson_ptrs(rng: &mut StreamRng, mean: f64) -> u64 {
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.024_83 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.uniform() - 0.5;
        let v = rng.uniform();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -mean + k * loglam - libm::lgamma(k + 1.0);
        if lhs <= rhs {
            return k as u64;
        }
    }
}
