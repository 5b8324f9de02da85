//! Bracketing and Brent's method.

use crate::error::{Error, Result};

/// Finds a root of `f` in `[a, b]` where `f(a)` and `f(b)` differ in sign.
///
/// Stops once the bracket is narrower than `rel_tol * |x| + abs_tol`.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoConvergence {
            what: "root bracket",
            estimate: a,
            error: b - a,
        });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..500 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * (rel_tol * b.abs() + abs_tol);
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::NoConvergence {
        what: "Brent iteration",
        estimate: b,
        error: (c - b).abs(),
    })
}

/// Expands `hi` geometrically from `start` until `f(hi) <= 0`, for a function
/// that is positive near zero and eventually non-positive. Returns `(lo, hi)`.
pub fn bracket_decreasing<F: FnMut(f64) -> f64>(mut f: F, start: f64) -> Result<(f64, f64)> {
    let mut lo = 0.0;
    let mut hi = start.max(f64::MIN_POSITIVE);
    for _ in 0..2000 {
        let v = f(hi);
        if v.is_nan() {
            break;
        }
        if v <= 0.0 {
            return Ok((lo, hi));
        }
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            break;
        }
    }
    Err(Error::NoConvergence {
        what: "bracket expansion",
        estimate: hi,
        error: f64::INFINITY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn finds_cube_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15, 0.0).unwrap();
        assert_relative_eq!(r, 2f64.cbrt(), epsilon = 1e-14);
    }

    #[test]
    fn rejects_bad_bracket() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 0.0).is_err());
    }

    #[test]
    fn bracket_expands() {
        let (lo, hi) = bracket_decreasing(|x| 100.0 - x, 1.0).unwrap();
        assert!(lo < 100.0 && hi >= 100.0);
    }
}
