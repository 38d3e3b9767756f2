//! Fixed-order Gauss–Legendre rules and the adaptive per-interval driver
//! used for bin integrals and the unit-interval functionals of a psf.

/// Positive half of the 16-point Gauss–Legendre rule on [-1, 1] as
/// (node, weight) pairs; the rule is symmetric.
const GL16: [(f64, f64); 8] = [
    (0.095_012_509_837_637_45, 0.189_450_610_455_068_59),
    (0.281_603_550_779_258_9, 0.182_603_415_044_923_6),
    (0.458_016_777_657_227_37, 0.169_156_519_395_002_62),
    (0.617_876_244_402_643_8, 0.149_595_988_816_576_76),
    (0.755_404_408_355_003, 0.124_628_971_255_534_03),
    (0.865_631_202_387_831_8, 0.095_158_511_682_492_59),
    (0.944_575_023_073_232_6, 0.062_253_523_938_647_706),
    (0.989_400_934_991_649_9, 0.027_152_459_411_754_037),
];

/// Absolute disagreement between the whole-interval and two-half estimates
/// below which an interval is accepted.
pub const BIN_TOLERANCE: f64 = 1e-12;

const MAX_DEPTH: u32 = 40;

/// 16-point Gauss–Legendre estimate of `∫_a^b f`.
pub fn gauss_legendre_16<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for &(x, w) in GL16.iter() {
        let dx = half * x;
        acc += w * (f(mid - dx) + f(mid + dx));
    }
    acc * half
}

/// Adaptive Gauss–Legendre integration: an interval is accepted when the
/// 16-point rule on it agrees with the sum over its two halves within
/// `abs_tol + rel_tol·|estimate|`; otherwise each half is refined.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let whole = gauss_legendre_16(f, a, b);
    refine(f, a, b, whole, abs_tol, rel_tol, 0)
}

fn refine<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, abs_tol: f64, rel_tol: f64, depth: u32) -> f64 {
    let mid = 0.5 * (a + b);
    let left = gauss_legendre_16(f, a, mid);
    let right = gauss_legendre_16(f, mid, b);
    let halves = left + right;
    if (halves - whole).abs() <= abs_tol + rel_tol * halves.abs() || depth >= MAX_DEPTH {
        return halves;
    }
    refine(f, a, mid, left, 0.5 * abs_tol, rel_tol, depth + 1)
        + refine(f, mid, b, right, 0.5 * abs_tol, rel_tol, depth + 1)
}

/// Integral of `f` over one grid bin to the per-bin tolerance. The bin is
/// first cut into panels no wider than `feature`, the narrowest scale on
/// which `f` varies, so the adaptive check cannot miss a peak.
pub fn bin_integral<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, feature: f64) -> f64 {
    let panels = ((b - a) / feature).ceil().max(1.0) as usize;
    if panels == 1 {
        return integrate(f, a, b, BIN_TOLERANCE, 0.0);
    }
    let w = (b - a) / panels as f64;
    let tol = BIN_TOLERANCE / panels as f64;
    let parts: Vec<f64> = (0..panels)
        .map(|i| {
            let lo = a + i as f64 * w;
            let hi = if i + 1 == panels { b } else { a + (i + 1) as f64 * w };
            integrate(f, lo, hi, tol, 0.0)
        })
        .collect();
    pairwise_sum(&parts)
}

/// `∫_0^1 f` computed bin-by-bin on `panels` equal panels and summed
/// pairwise. Each panel is refined to `rel_tol` of its own value, with an
/// absolute floor of `rel_tol` times a first-pass estimate of `∫|f|` spread
/// over the panels, so near-zero panels cannot demand more than round-off
/// allows.
pub fn unit_interval<F: Fn(f64) -> f64>(f: &F, panels: usize, rel_tol: f64) -> f64 {
    let panels = panels.max(1);
    let w = 1.0 / panels as f64;
    let bounds: Vec<(f64, f64)> =
        (0..panels).map(|i| (i as f64 * w, if i + 1 == panels { 1.0 } else { (i + 1) as f64 * w })).collect();
    let first: Vec<f64> = bounds.iter().map(|&(a, b)| gauss_legendre_16(f, a, b)).collect();
    let magnitude: f64 = bounds.iter().map(|&(a, b)| gauss_legendre_16(&|x: f64| f(x).abs(), a, b)).sum();
    let floor = rel_tol * magnitude / panels as f64;
    let parts: Vec<f64> =
        bounds.iter().zip(&first).map(|(&(a, b), &whole)| refine(f, a, b, whole, floor, rel_tol, 0)).collect();
    pairwise_sum(&parts)
}

/// Pairwise (cascade) summation; the order of additions depends only on
/// the slice length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        len if len <= 8 => xs.iter().sum(),
        len => {
            let (l, r) = xs.split_at(len / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// Edges `i/n` for `i = 0..=n`, with the last edge pinned to exactly 1.
pub fn grid_edges(n: usize) -> Vec<f64> {
    (0..=n).map(|i| if i == n { 1.0 } else { i as f64 / n as f64 }).collect()
}
