//! Brent's method on a sign-changing bracket.

use super::Tolerance;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Finds a root of `f` in `[lo, hi]`, see [`find_root_with`].
pub fn find_root<T, F>(mut f: F, lo: T, hi: T, tol: Tolerance<T>) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    find_root_with(|x| Ok(f(x)), lo, hi, tol)
}

/// Brent's method for a fallible objective.
///
/// Stops when `|f(x)| <= tol.abs` or the bracket has shrunk to
/// `tol.rel * |x|`. Interpolation steps are skipped whenever any of the
/// values involved is infinite, which falls back to bisection.
pub fn find_root_with<T, F>(mut f: F, lo: T, hi: T, tol: Tolerance<T>) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    tol.validate()?;
    if !(lo <= hi) {
        return Err(Error::InvalidInterval {
            lo: to_f64(lo),
            hi: to_f64(hi),
        });
    }

    let mut eval = |x: T| -> Result<T> {
        let y = f(x)?;
        if y.is_nan() {
            return Err(Error::Domain(format!("objective is NaN at {}", to_f64(x))));
        }
        Ok(y)
    };

    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (eval(a)?, eval(b)?);
    if fa.abs() <= tol.abs {
        return Ok(a);
    }
    if fb.abs() <= tol.abs {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(Error::NotBracketed {
            lo: to_f64(lo),
            hi: to_f64(hi),
            f_lo: to_f64(fa),
            f_hi: to_f64(fb),
        });
    }

    let half: T = lit(0.5);
    let two: T = lit(2.0);
    let three: T = lit(3.0);

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..tol.max_iter {
        if (fb > T::zero()) == (fc > T::zero()) {
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

        let step_tol =
            two * T::epsilon() * b.abs() + half * tol.rel * b.abs() + T::min_positive_value();
        let mid = half * (c - b);
        if mid.abs() <= step_tol || fb.abs() <= tol.abs {
            return Ok(b);
        }

        let finite = fa.is_finite() && fb.is_finite() && fc.is_finite();
        if finite && e.abs() >= step_tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = two * mid * s;
                q = T::one() - s;
            } else {
                // inverse quadratic
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * mid * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let bound = (three * mid * q - (step_tol * q).abs()).min((e * q).abs());
            if two * p < bound {
                e = d;
                d = p / q;
            } else {
                d = mid;
                e = d;
            }
        } else {
            d = mid;
            e = d;
        }

        a = b;
        fa = fb;
        b = if d.abs() > step_tol {
            b + d
        } else if mid > T::zero() {
            b + step_tol
        } else {
            b - step_tol
        };
        fb = eval(b)?;
    }

    Err(Error::RootNoConvergence {
        iterations: tol.max_iter,
        x: to_f64(b),
    })
}
