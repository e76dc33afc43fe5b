//! Derivative-free numeric primitives shared by the solvers.

/// Hard cap on bisection iterations; 2^-200 underflows any bracket we use.
const MAX_BISECT_ITERS: usize = 200;

/// Shrinks a sign-change bracket of `f` to the given width by bisection.
///
/// Returns the bracket midpoint, or `None` when `f(lo)` and `f(hi)` do not
/// straddle zero. Exact zeros at either end are returned as-is.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, width: f64) -> Option<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    for _ in 0..MAX_BISECT_ITERS {
        if hi - lo <= width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Some(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Scans `f` on a uniform grid over `[lo, hi]` and returns every bracket
/// `(x_i, x_{i+1})` across which the sign changes. A grid point where `f`
/// vanishes exactly is reported as the degenerate bracket `(x, x)`.
pub fn scan_brackets<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2, "scan needs at least two grid points");
    let mut out = Vec::new();
    let step = (hi - lo) / (n - 1) as f64;
    let mut prev_x = lo;
    let mut prev_f = f(lo);
    if prev_f == 0.0 {
        out.push((lo, lo));
    }
    for i in 1..n {
        let x = if i + 1 == n { hi } else { lo + step * i as f64 };
        let fx = f(x);
        if fx == 0.0 {
            out.push((x, x));
        } else if prev_f != 0.0 && fx.is_finite() && prev_f.is_finite() && fx.signum() != prev_f.signum() {
            out.push((prev_x, x));
        }
        prev_x = x;
        prev_f = fx;
    }
    out
}

/// Refines every scanned bracket with [`bisect`]; degenerate brackets pass
/// through unchanged. Roots closer than `width` are deduplicated.
pub fn scan_roots<F: Fn(f64) -> f64 + Copy>(
    f: F,
    lo: f64,
    hi: f64,
    n: usize,
    width: f64,
) -> Vec<f64> {
    let mut roots: Vec<f64> = Vec::new();
    for (a, b) in scan_brackets(f, lo, hi, n) {
        let r = if a == b { Some(a) } else { bisect(f, a, b, width) };
        if let Some(r) = r {
            if roots.iter().all(|&q| (q - r).abs() > width.max(1e-15)) {
                roots.push(r);
            }
        }
    }
    roots
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` with absolute error
/// target `tol`. The integrand is assumed smooth; callers split at known
/// kinks first.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
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
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}
