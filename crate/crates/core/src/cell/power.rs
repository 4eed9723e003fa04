//! Transmit power expressions of the continuum model.
//!
//! With SIC the per-user power solves
//! `zeta P'(r) = 2 pi rho r P(r) + (N_th/K) eta r^(eta-1)`, `P(R_0) = 0`,
//! and the BS total is `2 pi rho int_{R_0}^{R_c} P(s) s ds`. Without SIC
//! every user sees the full cell power as interference and the total has a
//! rational closed form with a feasibility wall.

use std::fmt;

use super::{CellParams, Coefficients};
use crate::error::{Error, Result};
use crate::numerics::{
    gamma, integrate, lower_incomplete_gamma, upper_incomplete_gamma, Tolerance,
};
use crate::scalar::{lit, to_f64, Real};

/// Which total-power expression to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PowerModel {
    Sic,
    NoSic,
    /// SIC total in the `gamma* -> inf` limit.
    SicAsymptote,
}

impl fmt::Display for PowerModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PowerModel::Sic => "SIC",
            PowerModel::NoSic => "NoSIC",
            PowerModel::SicAsymptote => "Asymptote",
        })
    }
}

fn model_tolerance<T: Real>() -> Tolerance<T> {
    let t = Tolerance::default();
    Tolerance {
        abs: T::zero(),
        max_iter: 200,
        ..t
    }
}

/// Per-user transmit power `P(r)` for a user at distance `r`.
///
/// `P(r) = b exp(a r^2/2) int_{R_0}^r s^(eta-1) exp(-a s^2/2) ds`, evaluated
/// after the substitution `s = r (1 - u)` so the integrand stays bounded and
/// the nodes keep full precision when `r` is close to `R_0`.
pub fn per_user_power<T: Real>(p: &CellParams<T>, r: T) -> Result<T> {
    p.validate()?;
    if !(r >= p.min_distance && r <= p.radius) {
        return Err(Error::OutsideCell {
            r: to_f64(r),
            r0: to_f64(p.min_distance),
            rc: to_f64(p.radius),
        });
    }
    if r == p.min_distance || r == T::zero() {
        return Ok(T::zero());
    }
    let co = p.coefficients();
    let eta = p.pathloss_exponent;
    let q = co.a * r * r * lit(0.5);
    let width = (r - p.min_distance) / r;
    let integral = integrate(
        |u: T| (T::one() - u).powf(eta - T::one()) * (q * u * (lit::<T>(2.0) - u)).exp(),
        T::zero(),
        width,
        model_tolerance(),
    )?;
    Ok(co.b * r.powf(eta) * integral)
}

// (N_th/K) R_c^eta eta int_{t0}^1 t^(eta-1) (exp(beta (1 - t^2)) - 1) dt,
// integrated in u = 1 - t over [0, 1 - t0].
//
// The `- 1` inside the integrand absorbs the `- 1` of the bracketed
// expression, so there is no cancellation for small beta, and it also
// carries the `(R_0/R_c)^eta` term so the result is exactly the integrated
// power of the users in the annulus.
fn sic_total<T: Real>(p: &CellParams<T>, co: &Coefficients<T>, beta: T) -> Result<T> {
    if beta == T::zero() {
        return Ok(T::zero());
    }
    let eta = p.pathloss_exponent;
    let width = (p.radius - p.min_distance) / p.radius;
    let integral = integrate(
        |u: T| (T::one() - u).powf(eta - T::one()) * (beta * u * (lit::<T>(2.0) - u)).exp_m1(),
        T::zero(),
        width,
        model_tolerance(),
    )?;
    Ok(co.c * p.radius.powf(eta) * eta * integral)
}

/// Total BS power with SIC, by quadrature.
///
/// For `R_0 = 0` this is
/// `(N_th/K) R_c^eta (eta e^beta int_0^1 t^(eta-1) e^(-beta t^2) dt - 1)`.
/// For `R_0 > 0` the result is `2 pi rho int_{R_0}^{R_c} P(s) s ds`, which
/// equals `zeta P(R_c) - (N_th/K)(R_c^eta - R_0^eta)`.
pub fn bs_power_sic<T: Real>(p: &CellParams<T>) -> Result<T> {
    p.validate()?;
    let co = p.coefficients();
    sic_total(p, &co, co.beta)
}

/// SIC total in the limit `gamma* -> inf` (`zeta -> 1`, `beta -> beta2`).
///
/// Upper bound of [`bs_power_sic`] over all finite SINR targets.
pub fn bs_power_sic_asymptotic<T: Real>(p: &CellParams<T>) -> Result<T> {
    p.validate()?;
    let co = p.coefficients();
    sic_total(p, &co, co.beta2)
}

/// SIC total through the lower incomplete gamma function (`R_0 = 0` only):
///
/// `(N_th/K) R_c^eta e^beta beta^(-eta/2) gamma((eta+2)/2, beta)`.
pub fn bs_power_sic_gamma_form<T: Real>(p: &CellParams<T>) -> Result<T> {
    p.validate()?;
    if p.min_distance > T::zero() {
        return Err(Error::UnsupportedForm {
            r0: to_f64(p.min_distance),
        });
    }
    let co = p.coefficients();
    let beta = co.beta;
    if beta == T::zero() {
        return Ok(T::zero());
    }
    let eta = p.pathloss_exponent;
    let half_eta = eta * lit(0.5);
    let shape = half_eta + T::one();
    let lower = lower_incomplete_gamma(shape, beta)?;
    let scale = (beta - half_eta * beta.ln()).exp();
    Ok(co.c * p.radius.powf(eta) * scale * lower)
}

/// `(N_th/K) R_c^eta 2 beta e^beta (Gamma((eta+2)/2, beta) - Gamma((eta+2)/2))`.
///
/// This is the frequently quoted gamma expression without the
/// `beta^(-eta/2)` normalisation and with the complement sign flipped. It is
/// always negative for `beta > 0` and is only kept so reports can show it
/// next to [`bs_power_sic_gamma_form`].
pub fn bs_power_sic_unnormalized_gamma_form<T: Real>(p: &CellParams<T>) -> Result<T> {
    p.validate()?;
    let co = p.coefficients();
    let eta = p.pathloss_exponent;
    let shape = eta * lit(0.5) + T::one();
    let bracket = upper_incomplete_gamma(shape, co.beta)? - gamma(shape)?;
    Ok(co.c * p.radius.powf(eta) * lit::<T>(2.0) * co.beta * co.beta.exp() * bracket)
}

/// Total BS power without SIC.
///
/// `P = [2 pi rho (N_th/K) R_c^(eta+2) (1 - (R_0/R_c)^(eta+2)) / (eta+2)]
///      / [zeta - pi rho (R_c^2 - R_0^2)]`
///
/// Fails with [`Error::Infeasible`] when the denominator is not positive,
/// counting a denominator within rounding of zero (`8 eps zeta`) as zero.
pub fn bs_power_no_sic<T: Real>(p: &CellParams<T>) -> Result<T> {
    p.validate()?;
    if p.density == T::zero() {
        return Ok(T::zero());
    }
    let co = p.coefficients();
    let eta = p.pathloss_exponent;
    let load = p.users_per_cell();
    let denom = co.zeta - load;
    if !(denom > lit::<T>(8.0) * T::epsilon() * co.zeta) {
        let area = T::PI() * (p.radius * p.radius - p.min_distance * p.min_distance);
        let critical_sinr = if load > T::one() {
            to_f64(T::one() / (load - T::one()))
        } else {
            f64::INFINITY
        };
        return Err(Error::Infeasible {
            load: to_f64(load),
            zeta: to_f64(co.zeta),
            critical_density: to_f64(co.zeta / area),
            critical_sinr,
        });
    }
    let e2 = eta + lit(2.0);
    let t0 = p.min_distance / p.radius;
    let numer =
        lit::<T>(2.0) * T::PI() * p.density * co.c * p.radius.powf(e2) * (T::one() - t0.powf(e2))
            / e2;
    Ok(numer / denom)
}

/// Dispatches to the total-power expression selected by `model`.
pub fn total_power<T: Real>(p: &CellParams<T>, model: PowerModel) -> Result<T> {
    match model {
        PowerModel::Sic => bs_power_sic(p),
        PowerModel::NoSic => bs_power_no_sic(p),
        PowerModel::SicAsymptote => bs_power_sic_asymptotic(p),
    }
}
