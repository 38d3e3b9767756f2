//! Bessel function of the first kind, order one.

#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_FROM: f64 = 30.0;

/// `J₁(x)` to about 1e-13 absolute on the whole real line.
///
/// Power series for |x| ≤ 8, the periodic-trapezoid form of Bessel's
/// integral on 8 < |x| < 30 and the Hankel expansion beyond.
pub fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SERIES_LIMIT {
        return x * 0.5 * airy_amplitude_series(ax);
    } else if ax < ASYMPTOTIC_FROM {
        bessel_integral(ax)
    } else {
        hankel(ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// `2 J₁(z)/z`, finite at the origin where it equals 1.
pub fn airy_amplitude(z: f64) -> f64 {
    let az = z.abs();
    if az <= SERIES_LIMIT {
        airy_amplitude_series(az)
    } else {
        2.0 * j1(az) / az
    }
}

// Σ_k (-1)^k (z/2)^{2k} / (k! (k+1)!) = 2 J₁(z)/z
fn airy_amplitude_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (k + 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > 2.0 {
            break;
        }
        if k > 200.0 {
            break;
        }
    }
    sum
}

// J₁(x) = (1/2π) ∫_{-π}^{π} cos(τ − x sin τ) dτ; the integrand is periodic so
// the trapezoid rule converges geometrically (aliasing error ~ J_{1+N}(x)).
fn bessel_integral(x: f64) -> f64 {
    const N: usize = 96;
    let h = 2.0 * PI / N as f64;
    let mut acc = 0.0;
    for i in 0..N {
        let tau = -PI + i as f64 * h;
        acc += (tau - x * tau.sin()).cos();
    }
    acc / N as f64
}

fn hankel(x: f64) -> f64 {
    // a_k(1) = Π_{j=1..k} (4 − (2j−1)²) / (k! 8^k)
    let mu = 4.0;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut xp = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            a *= (mu - odd * odd) / (k as f64 * 8.0);
            xp *= x;
        }
        let term = a / xp;
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - 0.75 * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}
