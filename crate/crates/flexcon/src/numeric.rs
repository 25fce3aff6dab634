//! Small numerical kernels: error function, adaptive Simpson, bracketed
//! root finding, golden-section search and pairwise summation.

use crate::error::{Error, Result};

/// Error function, from `libm` (a port of the musl implementation, accurate
/// to about one ulp).
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Inverse error function on (−1, 1), ±∞ at ±1.
///
/// The `statrs` approximation is polished with Newton steps against [`erf`]
/// so that `erf(erf_inv(y))` round-trips to near machine precision.
pub fn erf_inv(y: f64) -> f64 {
    if y.is_nan() || y.abs() > 1.0 {
        return f64::NAN;
    }
    if y.abs() == 1.0 {
        return y * f64::INFINITY;
    }
    let mut x = statrs::function::erf::erf_inv(y);
    for _ in 0..3 {
        let slope = std::f64::consts::FRAC_2_SQRT_PI * (-x * x).exp();
        if !(slope > 0.0) {
            break;
        }
        let step = (erf(x) - y) / slope;
        x -= step;
        if step.abs() <= 1e-17 * x.abs() {
            break;
        }
    }
    x
}

/// Result of an adaptive Simpson integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of local error estimates over panels that hit the depth limit.
    pub unresolved: f64,
    pub evaluations: usize,
}

const SIMPSON_MAX_DEPTH: u32 = 52;

/// Adaptive Simpson on `[a, b]` with absolute tolerance `tol`.
///
/// Panels that reach the depth limit are accepted, and their error estimates
/// are accumulated in `unresolved`. A jump discontinuity ends up in a panel of
/// width ~2⁻⁵² and contributes almost nothing, while a genuinely
/// non-integrable integrand leaves a large residue.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Quadrature {
    let mut q = Quadrature { value: 0.0, unresolved: 0.0, evaluations: 3 };
    if b <= a {
        return q;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    q.value = simpson_rec(f, a, b, fa, fm, fb, whole, tol, 0, &mut q);
    q
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    q: &mut Quadrature,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    q.evaluations += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    if depth >= SIMPSON_MAX_DEPTH || m <= a || m >= b {
        q.unresolved += diff.abs() / 15.0;
        return left + right + diff / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, q)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, q)
}

/// Integrate over `[a, b]` split into `panels` equal pieces, each adaptive.
/// Fails if the unresolved error exceeds `tol`.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize, tol: f64) -> Result<f64> {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut parts = Vec::with_capacity(panels);
    let mut unresolved = 0.0;
    for j in 0..panels {
        let lo = a + h * j as f64;
        let hi = if j + 1 == panels { b } else { a + h * (j + 1) as f64 };
        let q = adaptive_simpson(f, lo, hi, tol / panels as f64);
        unresolved += q.unresolved;
        parts.push(q.value);
    }
    if !(unresolved <= tol) {
        return Err(Error::Numerical(format!(
            "adaptive Simpson did not converge on [{a}, {b}] (unresolved error {unresolved:e})"
        )));
    }
    Ok(pairwise_sum(&parts))
}

/// Bisection for a sign change of `f` on `[lo, hi]`. Stops once the bracket is
/// narrower than `xtol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Numerical(format!("no sign change on [{lo}, {hi}] (f = {flo:e}, {fhi:e})")));
    }
    for _ in 0..200 {
        if hi - lo <= xtol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, xtol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > xtol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Global-ish maximisation on `[lo, hi]`: a coarse scan of `scan` points picks
/// the best bracket, golden-section refines it to `xtol`. The endpoints are
/// always candidates, so boundary optima are returned exactly.
pub fn scan_golden_max<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, scan: usize, xtol: f64) -> (f64, f64) {
    if hi <= lo {
        return (lo, f(lo));
    }
    let scan = scan.max(3);
    let xs: Vec<f64> = (0..scan).map(|j| lo + (hi - lo) * j as f64 / (scan - 1) as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut best = 0;
    for j in 1..scan {
        if vals[j] > vals[best] {
            best = j;
        }
    }
    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(scan - 1)];
    let (x, fx) = golden_max(f, a, b, xtol);
    if fx >= vals[best] {
        (x, fx)
    } else {
        (xs[best], vals[best])
    }
}

/// Pairwise (cascade) summation. The result depends only on the order of
/// `xs`, never on how the values were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `count` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![a],
        _ => (0..count).map(|j| a + (b - a) * j as f64 / (count - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_on_cubics() {
        let q = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12);
        assert!((q.value - (4.0 - 4.0 + 2.0)).abs() < 1e-14);
    }

    #[test]
    fn simpson_handles_a_jump() {
        let f = |x: f64| if x < 0.3 { 1.0 } else { 2.0 };
        let v = integrate_panels(&f, 0.0, 1.0, 16, 1e-12).unwrap();
        assert!((v - (0.3 + 1.4)).abs() < 1e-11, "{v}");
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0, 1e-14).is_err());
    }

    #[test]
    fn golden_and_scan() {
        let (x, _) = golden_max(&|x: f64| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
        let (x, fx) = scan_golden_max(&|x: f64| x, 0.0, 1.0, 64, 1e-10);
        assert_eq!((x, fx), (1.0, 1.0));
    }

    #[test]
    fn erf_reference_values() {
        assert!((erf(0.5) - 0.520_499_877_813_046_5).abs() < 1e-15);
        assert!((erf(-1.0) + 0.842_700_792_949_714_9).abs() < 1e-15);
        assert!((erf_inv(erf(0.7)) - 0.7).abs() < 1e-15);
        assert!((erf(erf_inv(0.999_999)) - 0.999_999).abs() < 1e-15);
        assert_eq!(erf_inv(1.0), f64::INFINITY);
    }

    #[test]
    fn pairwise_matches_naive_on_small_integers() {
        let xs: Vec<f64> = (1..=1000).map(|x| x as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
    }
}
