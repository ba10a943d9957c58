//! Bracketing root finders shared by the profile and metric code.

use crate::error::{Error, Result};

const MAX_ITER: usize = 300;

/// Bisection for a sign change of `f` on `[lo, hi]`, run until the bracket
/// is no wider than `tol` or stops shrinking in floating point.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoConvergence {
            what: "bisection (no sign change)",
            iterations: 0,
            residual: flo.abs().min(fhi.abs()),
        });
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return Ok(mid);
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
    let mid = 0.5 * (lo + hi);
    Err(Error::NoConvergence {
        what: "bisection",
        iterations: MAX_ITER,
        residual: f(mid).abs(),
    })
}

/// Newton iteration safeguarded by a bracket: any step leaving `[lo, hi]`
/// (or failing to halve the bracket fast enough) falls back to bisection.
/// `fdf` returns `(f(x), f'(x))`.
pub fn newton_bracketed<F: Fn(f64) -> (f64, f64)>(
    fdf: F,
    mut lo: f64,
    mut hi: f64,
    x0: f64,
    tol: f64,
) -> Result<f64> {
    let (flo, _) = fdf(lo);
    let (fhi, _) = fdf(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoConvergence {
            what: "newton (no sign change)",
            iterations: 0,
            residual: flo.abs().min(fhi.abs()),
        });
    }
    let lo_sign = flo.signum();
    let mut x = if x0 > lo && x0 < hi { x0 } else { 0.5 * (lo + hi) };
    let mut last_step = hi - lo;
    for _ in 0..MAX_ITER {
        let (fx, dfx) = fdf(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let (next, step) = if dfx.is_finite()
            && dfx != 0.0
            && newton > lo
            && newton < hi
            && (newton - x).abs() < 0.5 * last_step
        {
            (newton, (newton - x).abs())
        } else {
            let mid = 0.5 * (lo + hi);
            (mid, 0.5 * (hi - lo))
        };
        last_step = step;
        if step <= tol || next == x {
            return Ok(next);
        }
        x = next;
        if hi - lo <= tol {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        what: "newton",
        iterations: MAX_ITER,
        residual: fdf(x).0.abs(),
    })
}

/// Golden-section maximization of a unimodal function on `[a, b]`.
/// Returns `(argmax, max)`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if b - a <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
