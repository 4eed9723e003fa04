//! Complete and incomplete gamma functions for real `s > 0`.
//!
//! The incomplete functions use the power series when `x < s + 1` and the
//! Lentz continued fraction for the upper function otherwise; the other
//! function follows from `gamma(s,x) + Gamma(s,x) = Gamma(s)`.

// Coefficient tables are kept as published.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const MAX_TERMS: usize = 10_000;

fn check_shape<T: Real>(s: T) -> Result<()> {
    if !(s > T::zero()) || !s.is_finite() {
        return Err(Error::Domain(format!(
            "gamma shape must be finite and > 0, got {}",
            to_f64(s)
        )));
    }
    Ok(())
}

fn check_arg<T: Real>(x: T) -> Result<()> {
    if !(x >= T::zero()) {
        return Err(Error::Domain(format!(
            "incomplete gamma argument must be >= 0, got {}",
            to_f64(x)
        )));
    }
    Ok(())
}

/// `ln Gamma(s)` for `s > 0` (Lanczos, g = 7).
pub fn ln_gamma<T: Real>(s: T) -> Result<T> {
    check_shape(s)?;
    Ok(ln_gamma_unchecked(s))
}

fn ln_gamma_unchecked<T: Real>(s: T) -> T {
    let half: T = lit(0.5);
    if s < half {
        // reflection
        let pi = T::PI();
        return (pi / (pi * s).sin()).ln() - ln_gamma_unchecked(T::one() - s);
    }
    let x = s - T::one();
    let mut acc: T = lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + lit::<T>(c) / (x + lit(i as f64));
    }
    let t = x + lit(LANCZOS_G) + half;
    lit::<T>(0.5 * (2.0 * std::f64::consts::PI).ln()) + (x + half) * t.ln() - t + acc.ln()
}

/// `Gamma(s)` for `s > 0`.
pub fn gamma<T: Real>(s: T) -> Result<T> {
    Ok(ln_gamma(s)?.exp())
}

/// `exp(-x) x^s`, zero at `x = 0`.
fn kernel<T: Real>(s: T, x: T) -> T {
    if x == T::zero() {
        T::zero()
    } else {
        (s * x.ln() - x).exp()
    }
}

// sum_{n>=0} x^n / (s (s+1) ... (s+n))
fn lower_series<T: Real>(s: T, x: T) -> Result<T> {
    let mut term = T::one() / s;
    let mut sum = term;
    let mut denom = s;
    for _ in 0..MAX_TERMS {
        denom = denom + T::one();
        term = term * x / denom;
        sum = sum + term;
        if term.abs() <= sum.abs() * T::epsilon() {
            return Ok(sum);
        }
    }
    Err(Error::Domain(format!(
        "incomplete gamma series did not converge (s = {}, x = {})",
        to_f64(s),
        to_f64(x)
    )))
}

// Continued fraction for Gamma(s,x) / (exp(-x) x^s), modified Lentz.
fn upper_fraction<T: Real>(s: T, x: T) -> Result<T> {
    let tiny = T::min_positive_value() / T::epsilon();
    let two: T = lit(2.0);
    let mut b = x + T::one() - s;
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..=MAX_TERMS {
        let fi: T = lit(i as f64);
        let an = -fi * (fi - s);
        b = b + two;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = T::one() / d;
        let delta = d * c;
        h = h * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            return Ok(h);
        }
    }
    Err(Error::Domain(format!(
        "incomplete gamma continued fraction did not converge (s = {}, x = {})",
        to_f64(s),
        to_f64(x)
    )))
}

/// Lower incomplete gamma `gamma(s, x) = int_0^x t^(s-1) e^(-t) dt`.
pub fn lower_incomplete_gamma<T: Real>(s: T, x: T) -> Result<T> {
    check_shape(s)?;
    check_arg(x)?;
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x.is_infinite() {
        return gamma(s);
    }
    if x < s + T::one() {
        Ok(kernel(s, x) * lower_series(s, x)?)
    } else {
        let upper = kernel(s, x) * upper_fraction(s, x)?;
        Ok(gamma(s)? - upper)
    }
}

/// Upper incomplete gamma `Gamma(s, x) = int_x^inf t^(s-1) e^(-t) dt`.
pub fn upper_incomplete_gamma<T: Real>(s: T, x: T) -> Result<T> {
    check_shape(s)?;
    check_arg(x)?;
    if x == T::zero() {
        return gamma(s);
    }
    if x.is_infinite() {
        return Ok(T::zero());
    }
    if x < s + T::one() {
        Ok(gamma(s)? - kernel(s, x) * lower_series(s, x)?)
    } else {
        Ok(kernel(s, x) * upper_fraction(s, x)?)
    }
}
