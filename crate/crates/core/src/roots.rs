use crate::error::{Error, Result};

/// Bisection on a sign change in `[lo, hi]`.
///
/// `sign_lo` is the sign of `f` just inside `lo`; passing it explicitly lets
/// callers supply the analytic limit where `f(lo)` itself vanishes.
pub(crate) fn bisect(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    sign_lo: f64,
    rel_tol: f64,
) -> Result<f64> {
    let f_hi = f(hi);
    if f_hi * sign_lo > 0.0 {
        return Err(Error::Numeric(format!(
            "no sign change in [{lo}, {hi}] (f(hi) = {f_hi})"
        )));
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid.abs().max(f64::MIN_POSITIVE) || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm * sign_lo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Up to `steps` Newton updates, each kept only if it stays inside `[lo, hi]`.
pub(crate) fn newton_polish(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    mut x: f64,
    lo: f64,
    hi: f64,
    steps: usize,
) -> f64 {
    for _ in 0..steps {
        let d = df(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - f(x) / d;
        if !(next > lo && next < hi) {
            break;
        }
        x = next;
    }
    x
}
